#pragma once
// Prediction decoding, class-wise two-model ensembling and
// largest-connected-component post-processing.

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "renalparse/grid.hpp"
#include "renalparse/nets.hpp"

namespace renalparse {

// per-voxel argmax over the class axis, ties toward the lowest class index
LabelMap argmax_decode(const Tensor<float>& logits, Spacing3 spacing);

// Binary mask on the voxel grid (shape only, no spacing).
struct Mask3 {
  Shape3 shape{0, 0, 0};
  std::vector<std::uint8_t> v;

  Mask3() = default;
  explicit Mask3(Shape3 s) : shape(s), v(std::size_t(s[0]) * s[1] * s[2], 0) {}
  std::size_t size() const { return v.size(); }
  std::size_t index(int x, int y, int z) const {
    return std::size_t(x) + std::size_t(shape[0]) * (y + std::size_t(shape[1]) * z);
  }
};

Mask3 class_mask(const LabelMap& m, ClassId cls);

// Keeps exactly the largest connected component (6 or 26 connectivity).
// Size ties go to the component containing the lexicographically smallest
// (x,y,z) voxel. Empty in, empty out.
Mask3 largest_component(const Mask3& mask, int connectivity);

struct PostprocessSpec {
  std::set<ClassId> classes_to_filter{ClassId::kidney, ClassId::tumor};
  int connectivity = 26;
  // run the filter on each model's prediction before merging (as opposed
  // to once on the merged map)
  bool per_model = true;

  void validate() const {
    if (connectivity != 6 && connectivity != 26)
      throw std::invalid_argument("postprocess: connectivity must be 6 or 26");
    for (const ClassId c : classes_to_filter)
      if (c == ClassId::background || int(c) >= kNumClasses)
        throw std::invalid_argument("postprocess: can only filter foreground");
  }
};

// For each filtered class, voxels outside its largest component become
// background; other classes are untouched.
LabelMap postprocess(const LabelMap& m, const PostprocessSpec& spec);

enum class EnsembleSource { A, B };

struct EnsembleSpec {
  // exactly one source per foreground class; defaults follow the class-wise
  // rule: kidney/vein/artery from model A, tumor from model B
  std::array<EnsembleSource, 4> source{EnsembleSource::A, EnsembleSource::B,
                                       EnsembleSource::A, EnsembleSource::A};

  EnsembleSource source_for(ClassId c) const {
    return source[std::size_t(int(c) - 1)];
  }
};

// Start from background, paint the A-sourced classes (ascending class id),
// then the B-sourced classes (ascending), so later paints overwrite
// earlier ones. With the default spec: A's tumor voxels are discarded and
// B's tumor voxels are painted last, overwriting everything beneath.
LabelMap ensemble_merge(const LabelMap& pred_a, const LabelMap& pred_b,
                        const EnsembleSpec& spec);

// Full-volume inference helper: pads to the divisibility the network needs,
// runs a forward pass, decodes, crops back.
LabelMap predict_labelmap(Network<float>& net, const Volume& image);

}  // namespace renalparse
