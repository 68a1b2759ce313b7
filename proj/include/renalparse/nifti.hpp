#pragma once
// Minimal NIfTI-1 reader/writer for the .nii / .nii.gz files this project
// produces and consumes. Images are stored as 32-bit float, label maps as
// unsigned 8-bit; the affine is reduced to diagonal voxel spacing (phantoms
// are axis-aligned, no orientation handling).

#include <stdexcept>
#include <string>

#include "renalparse/grid.hpp"

namespace renalparse {

enum class NiftiStatus {
  ok,
  missing_file,
  malformed_header,
  non_3d,
  bad_datatype,
  bad_label_value,
  io_error,
};

struct NiftiError : std::runtime_error {
  NiftiStatus code;
  NiftiError(NiftiStatus c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}
};

// Accepts uint8/int16/float32/float64 voxels (cast to float, scl slope and
// intercept applied). Throws NiftiError.
Volume load_volume(const std::string& path);

// Accepts uint8 voxels only and validates the {0..4} range.
LabelMap load_labelmap(const std::string& path);

// Write gzip-compressed when the path ends in ".gz", raw otherwise.
// Both validate the grid before writing anything.
void save_volume(const Volume& v, const std::string& path);
void save_labelmap(const LabelMap& m, const std::string& path);

}  // namespace renalparse
