#include "renalparse/prep.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace renalparse {

void ClipSpec::validate() const {
  if (!(0.0 <= lo_percentile && lo_percentile < hi_percentile &&
        hi_percentile <= 100.0))
    throw std::invalid_argument("clip: need 0 <= lo < hi <= 100");
}

void NormStats::validate() const {
  if (!(std > 0.0) || !std::isfinite(std) || !std::isfinite(mean))
    throw std::invalid_argument("norm stats: std must be positive and finite");
}

void AugmentConfig::validate() const {
  for (const double p : {p_noise, p_rotation, p_zoom, p_flip, p_elastic})
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("augment: probabilities must be in [0,1]");
  if (!(zoom_lo > 0.0) || !(zoom_hi >= zoom_lo))
    throw std::invalid_argument("augment: zoom interval must be positive");
  for (const int a : flip_axes)
    if (a < 0 || a > 2)
      throw std::invalid_argument("augment: flip axis out of range");
  if (elastic_grid < 2)
    throw std::invalid_argument("augment: elastic grid spacing too small");
  if (noise_sigma < 0.0 || elastic_max_disp < 0.0)
    throw std::invalid_argument("augment: negative magnitude");
}

double percentile(std::vector<float> values, double p) {
  if (values.empty())
    throw std::invalid_argument("percentile: empty input");
  p = std::clamp(p, 0.0, 100.0);
  const double h = double(values.size() - 1) * p / 100.0;
  const std::size_t lo = std::size_t(h);
  const double frac = h - double(lo);
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double vlo = values[lo];
  if (frac == 0.0 || lo + 1 == values.size()) return vlo;
  const double vhi =
      *std::min_element(values.begin() + lo + 1, values.end());
  return vlo + frac * (vhi - vlo);
}

Volume clip_percentiles(const Volume& v, const ClipSpec& c) {
  c.validate();
  const double lo = percentile(v.data, c.lo_percentile);
  const double hi = percentile(v.data, c.hi_percentile);
  Volume out = v;
  for (float& x : out.data)
    x = float(std::clamp(double(x), lo, hi));
  return out;
}

NormStats compute_foreground_stats(
    const std::vector<std::pair<const Volume*, const LabelMap*>>& cases) {
  // two-pass pooled mean / population std over label != 0 voxels
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [vol, lab] : cases) {
    if (vol->shape != lab->shape)
      throw std::invalid_argument("foreground stats: image/label shape mismatch");
    const std::size_t n = vol->size();
    for (std::size_t i = 0; i < n; ++i)
      if (lab->data[i] != 0) {
        sum += double(vol->data[i]);
        ++count;
      }
  }
  if (count == 0)
    throw std::invalid_argument("foreground stats: no foreground voxels");
  const double mean = sum / double(count);
  double ssq = 0.0;
  for (const auto& [vol, lab] : cases) {
    const std::size_t n = vol->size();
    for (std::size_t i = 0; i < n; ++i)
      if (lab->data[i] != 0) {
        const double d = double(vol->data[i]) - mean;
        ssq += d * d;
      }
  }
  NormStats s{mean, std::sqrt(ssq / double(count))};
  s.validate();
  return s;
}

Volume zscore(const Volume& v, const NormStats& s) {
  s.validate();
  Volume out = v;
  const double inv = 1.0 / s.std;
  for (float& x : out.data) x = float((double(x) - s.mean) * inv);
  return out;
}

// ------------------------------------------------------------ resampling --

namespace {

// mirror boundary without edge repeat: ... c b | a b c | b a ...
int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

// In-place cubic B-spline prefilter (Unser), mirror boundary.
void bspline_prefilter(double* c, int n, int stride) {
  if (n < 2) return;
  constexpr double z = -0.26794919243112270647;  // sqrt(3) - 2
  const double lambda = (1.0 - z) * (1.0 - 1.0 / z);
  for (int i = 0; i < n; ++i) c[i * stride] *= lambda;

  // causal init, truncated horizon
  double sum = c[0];
  double zn = z;
  const int horizon = std::min(n, 28);  // |z|^28 < 1e-16
  for (int i = 1; i < horizon; ++i) {
    sum += zn * c[i * stride];
    zn *= z;
  }
  c[0] = sum;
  for (int i = 1; i < n; ++i) c[i * stride] += z * c[(i - 1) * stride];

  c[(n - 1) * stride] =
      (z / (z * z - 1.0)) * (z * c[(n - 2) * stride] + c[(n - 1) * stride]);
  for (int i = n - 2; i >= 0; --i)
    c[i * stride] = z * (c[(i + 1) * stride] - c[i * stride]);
}

void bspline_weights(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = (1.0 - 3.0 * u + 3.0 * u2 - u3) / 6.0;
  w[1] = (4.0 - 6.0 * u2 + 3.0 * u3) / 6.0;
  w[2] = (1.0 + 3.0 * u + 3.0 * u2 - 3.0 * u3) / 6.0;
  w[3] = u3 / 6.0;
}

// pixel-center mapping used by all resampling/warping code
double source_coord(int i_out, double scale) {
  return (double(i_out) + 0.5) * scale - 0.5;
}

int nearest_src(int i_out, double scale, int n_in) {
  const long r = std::lround(source_coord(i_out, scale));
  return int(std::clamp(r, 0l, long(n_in - 1)));
}

Shape3 resampled_shape(const Shape3& shape, const Spacing3& spacing,
                       const Spacing3& target) {
  Shape3 out;
  for (int i = 0; i < 3; ++i) {
    if (!(target[i] > 0.0))
      throw std::invalid_argument("resample: target spacing must be positive");
    out[i] = int(std::llround(double(shape[i]) * spacing[i] / target[i]));
    if (out[i] <= 0)
      throw std::invalid_argument("resample: degenerate output shape (axis " +
                                  std::to_string(i) + ")");
  }
  return out;
}

bool near_identity(const Shape3& a, const Shape3& b, const Spacing3& sa,
                   const Spacing3& sb) {
  for (int i = 0; i < 3; ++i) {
    if (a[i] != b[i]) return false;
    if (std::abs(sa[i] - sb[i]) > 1e-12 * std::max(sa[i], sb[i])) return false;
  }
  return true;
}

}  // namespace

Volume resample(const Volume& v, Spacing3 target) {
  const Shape3 out_shape = resampled_shape(v.shape, v.spacing, target);
  if (near_identity(v.shape, out_shape, v.spacing, target)) {
    Volume out = v;
    out.spacing = target;
    return out;
  }

  const int nx = v.shape[0], ny = v.shape[1], nz = v.shape[2];
  const int ox = out_shape[0], oy = out_shape[1], oz = out_shape[2];
  const double sx = double(nx) / ox, sy = double(ny) / oy,
               sz = double(nz) / oz;

  Volume out(out_shape, target);

  // per input slice: B-spline coefficient plane, computed on first use
  std::vector<std::optional<std::vector<double>>> planes(nz);
  const auto coeff_plane = [&](int zi) -> const std::vector<double>& {
    auto& slot = planes[zi];
    if (!slot) {
      std::vector<double> plane(std::size_t(nx) * ny);
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
          plane[std::size_t(y) * nx + x] = double(v.at(x, y, zi));
      for (int y = 0; y < ny; ++y)
        bspline_prefilter(plane.data() + std::size_t(y) * nx, nx, 1);
      for (int x = 0; x < nx; ++x)
        bspline_prefilter(plane.data() + x, ny, nx);
      slot = std::move(plane);
    }
    return *slot;
  };

  for (int zo = 0; zo < oz; ++zo) {
    const auto& plane = coeff_plane(nearest_src(zo, sz, nz));
    for (int yo = 0; yo < oy; ++yo) {
      const double ys = source_coord(yo, sy);
      const int yb = int(std::floor(ys));
      double wy[4];
      bspline_weights(ys - yb, wy);
      int yi[4];
      for (int k = 0; k < 4; ++k) yi[k] = mirror_index(yb - 1 + k, ny);
      for (int xo = 0; xo < ox; ++xo) {
        const double xs = source_coord(xo, sx);
        const int xb = int(std::floor(xs));
        double wx[4];
        bspline_weights(xs - xb, wx);
        double acc = 0.0;
        for (int ky = 0; ky < 4; ++ky) {
          const double* row = plane.data() + std::size_t(yi[ky]) * nx;
          double r = 0.0;
          for (int kx = 0; kx < 4; ++kx)
            r += wx[kx] * row[mirror_index(xb - 1 + kx, nx)];
          acc += wy[ky] * r;
        }
        out.at(xo, yo, zo) = float(acc);
      }
    }
  }
  return out;
}

LabelMap resample(const LabelMap& m, Spacing3 target) {
  const Shape3 out_shape = resampled_shape(m.shape, m.spacing, target);
  if (near_identity(m.shape, out_shape, m.spacing, target)) {
    LabelMap out = m;
    out.spacing = target;
    return out;
  }
  const double sx = double(m.shape[0]) / out_shape[0];
  const double sy = double(m.shape[1]) / out_shape[1];
  const double sz = double(m.shape[2]) / out_shape[2];
  LabelMap out(out_shape, target);
  for (int z = 0; z < out_shape[2]; ++z) {
    const int zi = nearest_src(z, sz, m.shape[2]);
    for (int y = 0; y < out_shape[1]; ++y) {
      const int yi = nearest_src(y, sy, m.shape[1]);
      for (int x = 0; x < out_shape[0]; ++x)
        out.at(x, y, z) = m.at(nearest_src(x, sx, m.shape[0]), yi, zi);
    }
  }
  return out;
}

// ---------------------------------------------------------- augmentation --

namespace {

struct Coord {
  double x, y, z;
};

float sample_trilinear(const Volume& v, Coord s, float fill) {
  const int nx = v.shape[0], ny = v.shape[1], nz = v.shape[2];
  if (s.x < -0.5 || s.x > nx - 0.5 || s.y < -0.5 || s.y > ny - 0.5 ||
      s.z < -0.5 || s.z > nz - 0.5)
    return fill;
  const int x0 = std::clamp(int(std::floor(s.x)), 0, nx - 1);
  const int y0 = std::clamp(int(std::floor(s.y)), 0, ny - 1);
  const int z0 = std::clamp(int(std::floor(s.z)), 0, nz - 1);
  const int x1 = std::min(x0 + 1, nx - 1);
  const int y1 = std::min(y0 + 1, ny - 1);
  const int z1 = std::min(z0 + 1, nz - 1);
  const double ux = std::clamp(s.x - x0, 0.0, 1.0);
  const double uy = std::clamp(s.y - y0, 0.0, 1.0);
  const double uz = std::clamp(s.z - z0, 0.0, 1.0);
  const double c00 = v.at(x0, y0, z0) * (1 - ux) + v.at(x1, y0, z0) * ux;
  const double c10 = v.at(x0, y1, z0) * (1 - ux) + v.at(x1, y1, z0) * ux;
  const double c01 = v.at(x0, y0, z1) * (1 - ux) + v.at(x1, y0, z1) * ux;
  const double c11 = v.at(x0, y1, z1) * (1 - ux) + v.at(x1, y1, z1) * ux;
  const double c0 = c00 * (1 - uy) + c10 * uy;
  const double c1 = c01 * (1 - uy) + c11 * uy;
  return float(c0 * (1 - uz) + c1 * uz);
}

std::uint8_t sample_nearest(const LabelMap& m, Coord s) {
  const long x = std::lround(s.x), y = std::lround(s.y), z = std::lround(s.z);
  if (x < 0 || y < 0 || z < 0 || x >= m.shape[0] || y >= m.shape[1] ||
      z >= m.shape[2])
    return 0;
  return m.at(int(x), int(y), int(z));
}

// inverse-mapping warp applied jointly so image and labels stay aligned
template <class MapFn>
void warp(Volume& img, LabelMap& lab, MapFn&& to_source) {
  const Volume src_img = img;
  const LabelMap src_lab = lab;
  const float fill = src_img.min_value();
  for (int z = 0; z < img.shape[2]; ++z)
    for (int y = 0; y < img.shape[1]; ++y)
      for (int x = 0; x < img.shape[0]; ++x) {
        const Coord s = to_source(x, y, z);
        img.at(x, y, z) = sample_trilinear(src_img, s, fill);
        lab.at(x, y, z) = sample_nearest(src_lab, s);
      }
}

void flip_axis(Volume& img, LabelMap& lab, int axis) {
  const int n = img.shape[axis];
  for (int z = 0; z < img.shape[2]; ++z)
    for (int y = 0; y < img.shape[1]; ++y)
      for (int x = 0; x < img.shape[0]; ++x) {
        int src[3] = {x, y, z};
        if (src[axis] >= n - 1 - src[axis]) continue;  // swap each pair once
        int dst[3] = {x, y, z};
        dst[axis] = n - 1 - src[axis];
        std::swap(img.at(src[0], src[1], src[2]),
                  img.at(dst[0], dst[1], dst[2]));
        std::swap(lab.at(src[0], src[1], src[2]),
                  lab.at(dst[0], dst[1], dst[2]));
      }
}

}  // namespace

std::pair<Volume, LabelMap> rotate_inplane(const Volume& v, const LabelMap& m,
                                           double degrees) {
  if (v.shape != m.shape)
    throw std::invalid_argument("rotate: image/label shape mismatch");
  Volume img = v;
  LabelMap lab = m;
  const double cx = (img.shape[0] - 1) * 0.5;
  const double cy = (img.shape[1] - 1) * 0.5;
  const double th = degrees * M_PI / 180.0;
  const double c = std::cos(th), s = std::sin(th);
  // inverse rotation about the z axis through the volume center
  warp(img, lab, [&](int x, int y, int z) {
    const double dx = x - cx, dy = y - cy;
    return Coord{cx + c * dx + s * dy, cy - s * dx + c * dy, double(z)};
  });
  return {std::move(img), std::move(lab)};
}

std::pair<Volume, LabelMap> augment(const Volume& v, const LabelMap& m,
                                    const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  if (v.shape != m.shape)
    throw std::invalid_argument("augment: image/label shape mismatch");

  Volume img = v;
  LabelMap lab = m;
  const double cx = (img.shape[0] - 1) * 0.5;
  const double cy = (img.shape[1] - 1) * 0.5;
  const double cz = (img.shape[2] - 1) * 0.5;

  if (rng.uniform() < cfg.p_noise && cfg.noise_sigma > 0.0)
    for (float& x : img.data) x += float(cfg.noise_sigma * rng.normal());

  if (rng.uniform() < cfg.p_rotation) {
    const double deg = rng.uniform(-cfg.rotation_deg, cfg.rotation_deg);
    std::tie(img, lab) = rotate_inplane(img, lab, deg);
  }

  if (rng.uniform() < cfg.p_zoom) {
    const double zm = rng.uniform(cfg.zoom_lo, cfg.zoom_hi);
    warp(img, lab, [&](int x, int y, int z) {
      return Coord{cx + (x - cx) / zm, cy + (y - cy) / zm, cz + (z - cz) / zm};
    });
  }

  if (rng.uniform() < cfg.p_flip && !cfg.flip_axes.empty()) {
    const int axis = cfg.flip_axes[std::size_t(
        rng.uniform_int(int(cfg.flip_axes.size())))];
    flip_axis(img, lab, axis);
  }

  if (rng.uniform() < cfg.p_elastic && cfg.elastic_max_disp > 0.0) {
    // coarse displacement lattice, trilinearly upsampled
    const int g = cfg.elastic_grid;
    const int gx = img.shape[0] / g + 2, gy = img.shape[1] / g + 2,
              gz = img.shape[2] / g + 2;
    std::vector<std::array<double, 3>> nodes(std::size_t(gx) * gy * gz);
    for (auto& n : nodes)
      for (int k = 0; k < 3; ++k)
        n[k] = rng.uniform(-cfg.elastic_max_disp, cfg.elastic_max_disp);
    const auto node = [&](int i, int j, int k) -> const std::array<double, 3>& {
      i = std::clamp(i, 0, gx - 1);
      j = std::clamp(j, 0, gy - 1);
      k = std::clamp(k, 0, gz - 1);
      return nodes[(std::size_t(k) * gy + j) * gx + i];
    };
    warp(img, lab, [&](int x, int y, int z) {
      const double fx = double(x) / g, fy = double(y) / g, fz = double(z) / g;
      const int i0 = int(fx), j0 = int(fy), k0 = int(fz);
      const double ux = fx - i0, uy = fy - j0, uz = fz - k0;
      double d[3] = {0, 0, 0};
      for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
          for (int di = 0; di < 2; ++di) {
            const double w = (di ? ux : 1 - ux) * (dj ? uy : 1 - uy) *
                             (dk ? uz : 1 - uz);
            const auto& nd = node(i0 + di, j0 + dj, k0 + dk);
            for (int k = 0; k < 3; ++k) d[k] += w * nd[k];
          }
      return Coord{x + d[0], y + d[1], z + d[2]};
    });
  }

  return {std::move(img), std::move(lab)};
}

}  // namespace renalparse
