#pragma once
// Core volumetric data model: intensity volumes and label maps on a regular
// grid with per-axis spacing in mm. Voxel order is x-fastest (NIfTI order):
// index = x + nx*(y + ny*z).

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace renalparse {

using Shape3 = std::array<int, 3>;
using Spacing3 = std::array<double, 3>;

// Label integer assignment. The anatomy order is a project convention fixed
// here and used everywhere (files, colors, metrics tables).
enum class ClassId : std::uint8_t {
  background = 0,
  kidney = 1,
  tumor = 2,
  vein = 3,
  artery = 4,
};

inline constexpr int kNumClasses = 5;
inline constexpr std::array<ClassId, 4> kForegroundClasses = {
    ClassId::kidney, ClassId::tumor, ClassId::vein, ClassId::artery};

const char* class_name(ClassId c);
ClassId class_from_name(const std::string& name);

struct Volume {
  Shape3 shape{0, 0, 0};
  Spacing3 spacing{1.0, 1.0, 1.0};
  std::vector<float> data;

  Volume() = default;
  Volume(Shape3 s, Spacing3 sp)
      : shape(s), spacing(sp),
        data(std::size_t(s[0]) * s[1] * s[2], 0.0f) {}

  std::size_t size() const {
    return std::size_t(shape[0]) * shape[1] * shape[2];
  }
  std::size_t index(int x, int y, int z) const {
    return std::size_t(x) + std::size_t(shape[0]) * (y + std::size_t(shape[1]) * z);
  }
  float& at(int x, int y, int z) { return data[index(x, y, z)]; }
  float at(int x, int y, int z) const { return data[index(x, y, z)]; }

  float min_value() const;
  float max_value() const;

  // throws std::invalid_argument on NaN/Inf values, non-positive spacing or
  // a data/shape mismatch
  void validate() const;
};

struct LabelMap {
  Shape3 shape{0, 0, 0};
  Spacing3 spacing{1.0, 1.0, 1.0};
  std::vector<std::uint8_t> data;

  LabelMap() = default;
  LabelMap(Shape3 s, Spacing3 sp)
      : shape(s), spacing(sp), data(std::size_t(s[0]) * s[1] * s[2], 0) {}

  std::size_t size() const {
    return std::size_t(shape[0]) * shape[1] * shape[2];
  }
  std::size_t index(int x, int y, int z) const {
    return std::size_t(x) + std::size_t(shape[0]) * (y + std::size_t(shape[1]) * z);
  }
  std::uint8_t& at(int x, int y, int z) { return data[index(x, y, z)]; }
  std::uint8_t at(int x, int y, int z) const { return data[index(x, y, z)]; }

  // throws on values outside {0..4} or shape/spacing violations
  void validate() const;
};

// Center crop / symmetric pad to target_shape. When an axis difference is
// odd the extra voxel goes to the high side. Fill defaults: the volume's
// minimum intensity for images, background for labels.
Volume crop_or_pad(const Volume& v, Shape3 target, float fill);
Volume crop_or_pad(const Volume& v, Shape3 target);
LabelMap crop_or_pad(const LabelMap& m, Shape3 target,
                     std::uint8_t fill = 0);

}  // namespace renalparse
