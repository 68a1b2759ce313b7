#pragma once
// Deterministic synthetic abdominal phantoms: one kidney ellipsoid, a tumor
// sphere straddling the kidney boundary, and a vein and artery tube that
// reach the kidney from the medial (low-x) side. Stands in for real CT
// cases at desk scale.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "renalparse/grid.hpp"

namespace renalparse {

struct PhantomSpec {
  Shape3 shape{64, 64, 64};
  Spacing3 spacing{0.5, 0.5, 0.75};
  std::uint64_t seed = 0;
  double noise_sigma = 10.0;  // HU
  // mean HU per class: background, kidney, tumor, vein, artery
  std::array<double, 5> class_mean_hu{40.0, 120.0, 90.0, 70.0, 150.0};

  void validate() const;  // shape >= 16^3, sigma >= 0, distinct means
};

// Identical spec => bit-identical output. Throws std::runtime_error when the
// shape is too small to place all four structures.
std::pair<Volume, LabelMap> generate_phantom(const PhantomSpec& spec);

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  // test = 1 - train - val
};

struct CaseEntry {
  std::string case_id;  // "case_0000"
  std::string split;    // train | val | test
  std::uint64_t seed;
};

// Writes case_%04d/image.nii.gz + label.nii.gz under out_dir plus a
// manifest.csv (case_id,split,seed). Case i uses seed base_seed + i, so
// generation parallelizes per case without changing results.
std::vector<CaseEntry> generate_dataset(int n_cases, std::uint64_t base_seed,
                                        const PhantomSpec& spec,
                                        const std::string& out_dir,
                                        SplitFractions split = {},
                                        int workers = 1);

std::vector<CaseEntry> read_manifest(const std::string& manifest_path);

// split sizes for n cases: train = round(train_frac*n),
// test = round(test_frac*n), val = remainder
std::array<int, 3> split_sizes(int n, SplitFractions split);

}  // namespace renalparse
