#include "renalparse/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace renalparse {

const char* class_name(ClassId c) {
  switch (c) {
    case ClassId::background:
      return "background";
    case ClassId::kidney:
      return "kidney";
    case ClassId::tumor:
      return "tumor";
    case ClassId::vein:
      return "vein";
    case ClassId::artery:
      return "artery";
  }
  return "invalid";
}

ClassId class_from_name(const std::string& name) {
  for (int i = 0; i < kNumClasses; ++i) {
    const auto c = ClassId(i);
    if (name == class_name(c)) return c;
  }
  throw std::invalid_argument("unknown class name: " + name);
}

namespace {

void check_geometry(const Shape3& shape, const Spacing3& spacing,
                    std::size_t n_data) {
  for (int i = 0; i < 3; ++i) {
    if (shape[i] <= 0)
      throw std::invalid_argument("grid: shape axis " + std::to_string(i) +
                                  " must be positive");
    if (!(spacing[i] > 0.0) || !std::isfinite(spacing[i]))
      throw std::invalid_argument("grid: spacing axis " + std::to_string(i) +
                                  " must be positive");
  }
  const std::size_t expect = std::size_t(shape[0]) * shape[1] * shape[2];
  if (n_data != expect)
    throw std::invalid_argument("grid: data size does not match shape");
}

// crop/pad index arithmetic shared by both grid kinds
template <class G, class V>
G crop_or_pad_impl(const G& in, Shape3 target, V fill) {
  for (int i = 0; i < 3; ++i)
    if (target[i] <= 0)
      throw std::invalid_argument("crop_or_pad: target shape must be positive");

  G out(target, in.spacing);
  std::fill(out.data.begin(), out.data.end(), fill);

  // per-axis overlap window: src start in the input, dst start in the output
  int src0[3], dst0[3], len[3];
  for (int i = 0; i < 3; ++i) {
    if (target[i] <= in.shape[i]) {  // crop: low side loses floor(diff/2)
      src0[i] = (in.shape[i] - target[i]) / 2;
      dst0[i] = 0;
      len[i] = target[i];
    } else {  // pad: low side gains floor(diff/2), extra voxel high side
      src0[i] = 0;
      dst0[i] = (target[i] - in.shape[i]) / 2;
      len[i] = in.shape[i];
    }
  }

  for (int z = 0; z < len[2]; ++z)
    for (int y = 0; y < len[1]; ++y) {
      const auto* src = &in.data[in.index(src0[0], src0[1] + y, src0[2] + z)];
      auto* dst = &out.data[out.index(dst0[0], dst0[1] + y, dst0[2] + z)];
      std::copy(src, src + len[0], dst);
    }
  return out;
}

}  // namespace

float Volume::min_value() const {
  return data.empty() ? 0.0f : *std::min_element(data.begin(), data.end());
}

float Volume::max_value() const {
  return data.empty() ? 0.0f : *std::max_element(data.begin(), data.end());
}

void Volume::validate() const {
  check_geometry(shape, spacing, data.size());
  for (const float v : data)
    if (!std::isfinite(v))
      throw std::invalid_argument("volume: non-finite voxel value");
}

void LabelMap::validate() const {
  check_geometry(shape, spacing, data.size());
  for (const std::uint8_t v : data)
    if (v >= kNumClasses)
      throw std::invalid_argument("label map: value " + std::to_string(v) +
                                  " outside {0..4}");
}

Volume crop_or_pad(const Volume& v, Shape3 target, float fill) {
  return crop_or_pad_impl(v, target, fill);
}

Volume crop_or_pad(const Volume& v, Shape3 target) {
  return crop_or_pad_impl(v, target, v.min_value());
}

LabelMap crop_or_pad(const LabelMap& m, Shape3 target, std::uint8_t fill) {
  return crop_or_pad_impl(m, target, fill);
}

}  // namespace renalparse
