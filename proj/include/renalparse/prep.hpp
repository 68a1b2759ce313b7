#pragma once
// Preprocessing: percentile clipping, global-foreground z-score, spacing
// resampling (cubic B-spline in-plane, nearest out-of-plane) and the
// stochastic augmentation stack (noise, rotation, zoom, flip, elastic).

#include <cstdint>
#include <utility>
#include <vector>

#include "renalparse/grid.hpp"
#include "renalparse/rng.hpp"

namespace renalparse {

struct ClipSpec {
  double lo_percentile = 0.5;
  double hi_percentile = 99.5;
  void validate() const;
};

struct NormStats {
  double mean = 0.0;
  double std = 1.0;  // population (1/N) standard deviation
  void validate() const;
};

struct AugmentConfig {
  double p_noise = 0.5;
  double p_rotation = 0.5;
  double p_zoom = 0.5;
  double p_flip = 0.5;
  double p_elastic = 0.5;
  double rotation_deg = 15.0;        // in-plane, about the z axis
  double zoom_lo = 0.9, zoom_hi = 1.1;
  std::vector<int> flip_axes{0, 1};
  int elastic_grid = 16;             // coarse displacement node spacing
  double elastic_max_disp = 4.0;     // voxels
  double noise_sigma = 0.1;          // intensity units (post z-score)
  std::uint64_t seed = 0;
  void validate() const;
};

// Percentiles over all voxels by linear interpolation between closest ranks
// (rank h = (N-1)*p/100); values outside [lo,hi] are clamped to them.
Volume clip_percentiles(const Volume& v, const ClipSpec& c);

// interpolated percentile of arbitrary values, same rank convention
double percentile(std::vector<float> values, double p);

// Pooled mean / population std over intensities at voxels with label != 0
// across all cases. Throws when there is no foreground voxel at all.
NormStats compute_foreground_stats(
    const std::vector<std::pair<const Volume*, const LabelMap*>>& cases);

Volume zscore(const Volume& v, const NormStats& s);

// Output shape = round(shape * spacing / target_spacing). Images: cubic
// B-spline interpolation in-plane, nearest neighbor along z. Labels:
// nearest neighbor on all axes.
Volume resample(const Volume& v, Spacing3 target_spacing);
LabelMap resample(const LabelMap& m, Spacing3 target_spacing);

// Applies noise, rotation, zoom, flip, elastic in that order, each fired
// independently with its configured probability. Geometric transforms
// sample the image trilinearly and the label map by nearest neighbor;
// noise touches the image only.
std::pair<Volume, LabelMap> augment(const Volume& v, const LabelMap& m,
                                    const AugmentConfig& cfg, Rng& rng);

// Rotation about the z axis through the volume center; the deterministic
// core of the augmentation rotation, exposed for direct use.
std::pair<Volume, LabelMap> rotate_inplane(const Volume& v, const LabelMap& m,
                                           double degrees);

}  // namespace renalparse
