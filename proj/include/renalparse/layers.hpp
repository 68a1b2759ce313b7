#pragma once
// Network building blocks with hand-written backward passes. Each layer
// caches what its backward needs from the last forward call; parameter
// gradients accumulate until zero_grad. Templated on the scalar type: the
// CLI trains in float (AVX2 kernels), gradient checks run in double.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "renalparse/kernels.hpp"
#include "renalparse/rng.hpp"
#include "renalparse/tensor.hpp"

namespace renalparse {

template <class T>
struct ParamRef {
  std::string name;
  std::vector<T>* value;
  std::vector<T>* grad;
};

// 3^3 (pad 1) or 1^3 convolution, stride 1. Weights: w[co][ci][dz][dy][dx].
template <class T>
class Conv3d {
 public:
  Conv3d() = default;
  Conv3d(int in_ch, int out_ch, int ksize, Rng& rng)
      : in_ch_(in_ch), out_ch_(out_ch), k_(ksize) {
    if (ksize != 1 && ksize != 3)
      throw std::invalid_argument("conv: kernel size must be 1 or 3");
    const int fan_in = in_ch * ksize * ksize * ksize;
    const double sd = std::sqrt(2.0 / double(fan_in));
    w_.resize(std::size_t(out_ch) * fan_in);
    for (auto& x : w_) x = T(sd * rng.normal());
    b_.assign(out_ch, T(0));
    gw_.assign(w_.size(), T(0));
    gb_.assign(b_.size(), T(0));
  }

  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }
  std::size_t param_count() const { return w_.size() + b_.size(); }

  Tensor<T> forward(const Tensor<T>& x) {
    if (x.c != in_ch_)
      throw std::invalid_argument("conv: expected " + std::to_string(in_ch_) +
                                  " channels, got " + std::to_string(x.c));
    x_ = x;
    Tensor<T> out(x.n, out_ch_, x.x, x.y, x.z);
    if (k_ == 1)
      forward1(x, out);
    else
      forward3(x, out);
    return out;
  }

  // returns grad wrt input, accumulates gw/gb
  Tensor<T> backward(const Tensor<T>& gout) {
    Tensor<T> gin(x_.n, in_ch_, x_.x, x_.y, x_.z);
    if (k_ == 1) {
      backward1(gout, gin);
    } else {
      backward3_input(gout, gin);
      backward3_weights(gout);
    }
    return gin;
  }

  void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".w", &w_, &gw_});
    out.push_back({prefix + ".b", &b_, &gb_});
  }

 private:
  std::size_t widx(int co, int ci, int dz, int dy, int dx) const {
    return (((std::size_t(co) * in_ch_ + ci) * k_ + dz) * k_ + dy) * k_ + dx;
  }

  void forward1(const Tensor<T>& x, Tensor<T>& out) {
    const std::size_t m = x.spatial();
    for (int n = 0; n < x.n; ++n)
      for (int co = 0; co < out_ch_; ++co) {
        T* dst = out.chan(n, co);
        std::fill(dst, dst + m, b_[co]);
        for (int ci = 0; ci < in_ch_; ++ci)
          kernels::axpy(dst, x.chan(n, ci), w_[widx(co, ci, 0, 0, 0)], m);
      }
  }

  void backward1(const Tensor<T>& gout, Tensor<T>& gin) {
    const std::size_t m = x_.spatial();
    for (int n = 0; n < x_.n; ++n)
      for (int co = 0; co < out_ch_; ++co) {
        const T* g = gout.chan(n, co);
        gb_[co] += T(kernels::sum(g, m));
        for (int ci = 0; ci < in_ch_; ++ci) {
          kernels::axpy(gin.chan(n, ci), g, w_[widx(co, ci, 0, 0, 0)], m);
          gw_[widx(co, ci, 0, 0, 0)] += T(kernels::dot(g, x_.chan(n, ci), m));
        }
      }
  }

  // One x-row update: dst[0..X) += sum_dx w[dx] * src[x+dx-1], zero padded.
  static void stencil_row(T* dst, const T* src, const T* w, int X) {
    if (X == 1) {
      dst[0] += w[1] * src[0];
      return;
    }
    dst[0] += w[1] * src[0] + w[2] * src[1];
    if (X > 2)
      kernels::axpy3(dst + 1, src, src + 1, src + 2, w[0], w[1], w[2],
                     std::size_t(X) - 2);
    dst[X - 1] += w[0] * src[X - 2] + w[1] * src[X - 1];
  }

  void forward3(const Tensor<T>& x, Tensor<T>& out) {
    const int X = x.x, Y = x.y, Z = x.z;
    for (int n = 0; n < x.n; ++n)
      for (int co = 0; co < out_ch_; ++co) {
        T* base = out.chan(n, co);
        std::fill(base, base + out.spatial(), b_[co]);
        for (int ci = 0; ci < in_ch_; ++ci)
          for (int dz = 0; dz < 3; ++dz)
            for (int dy = 0; dy < 3; ++dy) {
              const T* w = &w_[widx(co, ci, dz, dy, 0)];
              const int z0 = std::max(0, 1 - dz), z1 = std::min(Z, Z + 1 - dz);
              const int y0 = std::max(0, 1 - dy), y1 = std::min(Y, Y + 1 - dy);
              for (int z = z0; z < z1; ++z)
                for (int y = y0; y < y1; ++y)
                  stencil_row(out.row(n, co, y, z),
                              x.row(n, ci, y + dy - 1, z + dz - 1), w, X);
            }
      }
  }

  void backward3_input(const Tensor<T>& gout, Tensor<T>& gin) {
    // transposed stencil: gin(zi,yi) += w_flipped * gout(zi-dz+1, yi-dy+1)
    const int X = x_.x, Y = x_.y, Z = x_.z;
    for (int n = 0; n < x_.n; ++n)
      for (int ci = 0; ci < in_ch_; ++ci)
        for (int co = 0; co < out_ch_; ++co)
          for (int dz = 0; dz < 3; ++dz)
            for (int dy = 0; dy < 3; ++dy) {
              // flipped weights for the x stencil
              const T wf[3] = {w_[widx(co, ci, dz, dy, 2)],
                               w_[widx(co, ci, dz, dy, 1)],
                               w_[widx(co, ci, dz, dy, 0)]};
              const int z0 = std::max(0, 1 - dz), z1 = std::min(Z, Z + 1 - dz);
              const int y0 = std::max(0, 1 - dy), y1 = std::min(Y, Y + 1 - dy);
              for (int z = z0; z < z1; ++z)
                for (int y = y0; y < y1; ++y)
                  stencil_row(gin.row(n, ci, y + dy - 1, z + dz - 1),
                              gout.row(n, co, y, z), wf, X);
            }
  }

  void backward3_weights(const Tensor<T>& gout) {
    const int X = x_.x, Y = x_.y, Z = x_.z;
    for (int n = 0; n < x_.n; ++n)
      for (int co = 0; co < out_ch_; ++co) {
        gb_[co] += T(kernels::sum(gout.chan(n, co), gout.spatial()));
        for (int ci = 0; ci < in_ch_; ++ci)
          for (int dz = 0; dz < 3; ++dz)
            for (int dy = 0; dy < 3; ++dy) {
              double acc[3] = {0.0, 0.0, 0.0};
              const int z0 = std::max(0, 1 - dz), z1 = std::min(Z, Z + 1 - dz);
              const int y0 = std::max(0, 1 - dy), y1 = std::min(Y, Y + 1 - dy);
              for (int z = z0; z < z1; ++z)
                for (int y = y0; y < y1; ++y) {
                  const T* g = gout.row(n, co, y, z);
                  const T* s = x_.row(n, ci, y + dy - 1, z + dz - 1);
                  // edge columns handled separately, interior fused
                  if (X == 1) {
                    acc[1] += double(g[0]) * double(s[0]);
                    continue;
                  }
                  acc[1] += double(g[0]) * double(s[0]);
                  acc[2] += double(g[0]) * double(s[1]);
                  if (X > 2)
                    kernels::dot3(g + 1, s, s + 1, s + 2, std::size_t(X) - 2,
                                  acc);
                  acc[0] += double(g[X - 1]) * double(s[X - 2]);
                  acc[1] += double(g[X - 1]) * double(s[X - 1]);
                }
              for (int dx = 0; dx < 3; ++dx)
                gw_[widx(co, ci, dz, dy, dx)] += T(acc[dx]);
            }
      }
  }

  int in_ch_ = 0, out_ch_ = 0, k_ = 3;
  std::vector<T> w_, b_, gw_, gb_;
  Tensor<T> x_;
};

// Instance normalization with affine parameters, statistics per (n, c).
template <class T>
class InstanceNorm3d {
 public:
  static constexpr double kEps = 1e-5;

  InstanceNorm3d() = default;
  explicit InstanceNorm3d(int channels) : ch_(channels) {
    gamma_.assign(channels, T(1));
    beta_.assign(channels, T(0));
    gg_.assign(channels, T(0));
    gb_.assign(channels, T(0));
  }

  std::size_t param_count() const { return gamma_.size() + beta_.size(); }

  Tensor<T> forward(const Tensor<T>& x) {
    if (x.c != ch_) throw std::invalid_argument("instance norm: channel mismatch");
    x_ = x;
    const std::size_t m = x.spatial();
    mean_.assign(std::size_t(x.n) * ch_, 0.0);
    inv_std_.assign(std::size_t(x.n) * ch_, 0.0);
    Tensor<T> out(x.n, x.c, x.x, x.y, x.z);
    for (int n = 0; n < x.n; ++n)
      for (int c = 0; c < ch_; ++c) {
        double s, s2;
        kernels::moments(x.chan(n, c), m, s, s2);
        const double mu = s / double(m);
        const double var = std::max(0.0, s2 / double(m) - mu * mu);
        const double istd = 1.0 / std::sqrt(var + kEps);
        mean_[std::size_t(n) * ch_ + c] = mu;
        inv_std_[std::size_t(n) * ch_ + c] = istd;
        const double a = double(gamma_[c]) * istd;
        const double b = double(beta_[c]) - mu * a;
        kernels::scale_shift(out.chan(n, c), x.chan(n, c), T(a), T(b), m);
      }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& gout) {
    const std::size_t m = x_.spatial();
    Tensor<T> gin(x_.n, ch_, x_.x, x_.y, x_.z);
    for (int n = 0; n < x_.n; ++n)
      for (int c = 0; c < ch_; ++c) {
        const T* g = gout.chan(n, c);
        const T* x = x_.chan(n, c);
        const double mu = mean_[std::size_t(n) * ch_ + c];
        const double istd = inv_std_[std::size_t(n) * ch_ + c];
        const double sg = kernels::sum(g, m);          // sum of gout
        const double sgx = kernels::dot(g, x, m);      // sum gout*x
        const double sgxh = istd * (sgx - mu * sg);    // sum gout*xhat
        gb_[c] += T(sg);
        gg_[c] += T(sgxh);
        // gin = gamma*istd * (g - mean(g) - xhat*mean(g*xhat))
        //     = A*g + B*x + C
        const double A = double(gamma_[c]) * istd;
        const double B = -A * (sgxh / double(m)) * istd;
        const double C = -A * (sg / double(m)) - B * mu;
        kernels::scale_shift(gin.chan(n, c), g, T(A), T(C), m);
        kernels::axpy(gin.chan(n, c), x, T(B), m);
      }
    return gin;
  }

  void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".gamma", &gamma_, &gg_});
    out.push_back({prefix + ".beta", &beta_, &gb_});
  }

 private:
  int ch_ = 0;
  std::vector<T> gamma_, beta_, gg_, gb_;
  std::vector<double> mean_, inv_std_;
  Tensor<T> x_;
};

template <class T>
class ReLU {
 public:
  Tensor<T> forward(const Tensor<T>& x) {
    x_ = x;
    Tensor<T> out(x.n, x.c, x.x, x.y, x.z);
    kernels::relu(out.data(), x.data(), x.size());
    return out;
  }
  Tensor<T> backward(const Tensor<T>& gout) {
    Tensor<T> gin(x_.n, x_.c, x_.x, x_.y, x_.z);
    kernels::relu_backward(gin.data(), gout.data(), x_.data(), x_.size());
    return gin;
  }

 private:
  Tensor<T> x_;
};

// 2x max pooling with argmax routing; spatial dims must be even.
template <class T>
class MaxPool3d {
 public:
  Tensor<T> forward(const Tensor<T>& x) {
    if (x.x % 2 || x.y % 2 || x.z % 2)
      throw std::invalid_argument("maxpool: odd spatial dimension");
    in_n_ = x.n;
    in_c_ = x.c;
    in_x_ = x.x;
    in_y_ = x.y;
    in_z_ = x.z;
    Tensor<T> out(x.n, x.c, x.x / 2, x.y / 2, x.z / 2);
    arg_.assign(out.size(), 0);
    std::size_t o = 0;
    for (int n = 0; n < x.n; ++n)
      for (int c = 0; c < x.c; ++c)
        for (int z = 0; z < out.z; ++z)
          for (int y = 0; y < out.y; ++y)
            for (int xx = 0; xx < out.x; ++xx, ++o) {
              T best{};
              std::size_t besti = 0;
              bool first = true;
              for (int dz = 0; dz < 2; ++dz)
                for (int dy = 0; dy < 2; ++dy)
                  for (int dx = 0; dx < 2; ++dx) {
                    const std::size_t i = x.offset(n, c, 2 * xx + dx,
                                                   2 * y + dy, 2 * z + dz);
                    if (first || x.v[i] > best) {
                      best = x.v[i];
                      besti = i;
                      first = false;
                    }
                  }
              out.v[o] = best;
              arg_[o] = besti;
            }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& gout) {
    Tensor<T> gin(in_n_, in_c_, in_x_, in_y_, in_z_);
    for (std::size_t o = 0; o < gout.size(); ++o) gin.v[arg_[o]] += gout.v[o];
    return gin;
  }

 private:
  int in_n_ = 0, in_c_ = 0, in_x_ = 0, in_y_ = 0, in_z_ = 0;
  std::vector<std::size_t> arg_;
};

// 2x nearest-neighbor upsampling.
template <class T>
class NearestUpsample3d {
 public:
  Tensor<T> forward(const Tensor<T>& x) {
    in_n_ = x.n;
    in_c_ = x.c;
    in_x_ = x.x;
    in_y_ = x.y;
    in_z_ = x.z;
    Tensor<T> out(x.n, x.c, x.x * 2, x.y * 2, x.z * 2);
    for (int n = 0; n < x.n; ++n)
      for (int c = 0; c < x.c; ++c)
        for (int z = 0; z < out.z; ++z)
          for (int y = 0; y < out.y; ++y) {
            const T* src = x.row(n, c, y / 2, z / 2);
            T* dst = out.row(n, c, y, z);
            for (int xx = 0; xx < out.x; ++xx) dst[xx] = src[xx / 2];
          }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& gout) {
    Tensor<T> gin(in_n_, in_c_, in_x_, in_y_, in_z_);
    for (int n = 0; n < gout.n; ++n)
      for (int c = 0; c < gout.c; ++c)
        for (int z = 0; z < gout.z; ++z)
          for (int y = 0; y < gout.y; ++y) {
            const T* src = gout.row(n, c, y, z);
            T* dst = gin.row(n, c, y / 2, z / 2);
            for (int xx = 0; xx < gout.x; ++xx) dst[xx / 2] += src[xx];
          }
    return gin;
  }

 private:
  int in_n_ = 0, in_c_ = 0, in_x_ = 0, in_y_ = 0, in_z_ = 0;
};

// conv -> instance norm -> relu
template <class T>
struct ConvBlock {
  Conv3d<T> conv;
  InstanceNorm3d<T> norm;
  ReLU<T> act;

  ConvBlock() = default;
  ConvBlock(int in_ch, int out_ch, Rng& rng)
      : conv(in_ch, out_ch, 3, rng), norm(out_ch) {}

  Tensor<T> forward(const Tensor<T>& x) {
    return act.forward(norm.forward(conv.forward(x)));
  }
  Tensor<T> backward(const Tensor<T>& g) {
    return conv.backward(norm.backward(act.backward(g)));
  }
  void collect_params(const std::string& p, std::vector<ParamRef<T>>& out) {
    conv.collect_params(p + ".conv", out);
    norm.collect_params(p + ".norm", out);
  }
  std::size_t param_count() const {
    return conv.param_count() + norm.param_count();
  }
};

// pre-activation residual block: x + conv(relu(norm(conv(relu(norm(x))))))
template <class T>
struct ResBlock {
  InstanceNorm3d<T> norm1, norm2;
  ReLU<T> act1, act2;
  Conv3d<T> conv1, conv2;

  ResBlock() = default;
  ResBlock(int ch, Rng& rng)
      : norm1(ch), norm2(ch), conv1(ch, ch, 3, rng), conv2(ch, ch, 3, rng) {}

  Tensor<T> forward(const Tensor<T>& x) {
    Tensor<T> h = conv1.forward(act1.forward(norm1.forward(x)));
    h = conv2.forward(act2.forward(norm2.forward(h)));
    Tensor<T> out(x.n, x.c, x.x, x.y, x.z);
    kernels::add(out.data(), x.data(), h.data(), x.size());
    return out;
  }
  Tensor<T> backward(const Tensor<T>& g) {
    Tensor<T> gh = norm2.backward(act2.backward(conv2.backward(g)));
    Tensor<T> gx = norm1.backward(act1.backward(conv1.backward(gh)));
    kernels::add(gx.data(), gx.data(), g.data(), gx.size());
    return gx;
  }
  void collect_params(const std::string& p, std::vector<ParamRef<T>>& out) {
    norm1.collect_params(p + ".norm1", out);
    conv1.collect_params(p + ".conv1", out);
    norm2.collect_params(p + ".norm2", out);
    conv2.collect_params(p + ".conv2", out);
  }
  std::size_t param_count() const {
    return norm1.param_count() + norm2.param_count() + conv1.param_count() +
           conv2.param_count();
  }
};

// channel-axis concat/split and batch mixing helpers

template <class T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.n != b.n || a.x != b.x || a.y != b.y || a.z != b.z)
    throw std::invalid_argument("concat: spatial/batch mismatch");
  Tensor<T> out(a.n, a.c + b.c, a.x, a.y, a.z);
  const std::size_t m = a.spatial();
  for (int n = 0; n < a.n; ++n) {
    for (int c = 0; c < a.c; ++c)
      std::copy(a.chan(n, c), a.chan(n, c) + m, out.chan(n, c));
    for (int c = 0; c < b.c; ++c)
      std::copy(b.chan(n, c), b.chan(n, c) + m, out.chan(n, a.c + c));
  }
  return out;
}

template <class T>
void split_channels(const Tensor<T>& g, int c_first, Tensor<T>& ga,
                    Tensor<T>& gb) {
  ga = Tensor<T>(g.n, c_first, g.x, g.y, g.z);
  gb = Tensor<T>(g.n, g.c - c_first, g.x, g.y, g.z);
  const std::size_t m = g.spatial();
  for (int n = 0; n < g.n; ++n) {
    for (int c = 0; c < c_first; ++c)
      std::copy(g.chan(n, c), g.chan(n, c) + m, ga.chan(n, c));
    for (int c = 0; c < g.c - c_first; ++c)
      std::copy(g.chan(n, c_first + c), g.chan(n, c_first + c) + m,
                gb.chan(n, c));
  }
  return;
}

// out[i] = lambda*t[i] + (1-lambda)*t[pairing[i]] along the batch axis
template <class T>
Tensor<T> mix_batch(const Tensor<T>& t, T lambda,
                    const std::vector<int>& pairing) {
  if (int(pairing.size()) != t.n)
    throw std::invalid_argument("mix: pairing size != batch");
  Tensor<T> out(t.n, t.c, t.x, t.y, t.z);
  const std::size_t m = std::size_t(t.c) * t.spatial();
  for (int i = 0; i < t.n; ++i)
    kernels::lerp(out.data() + std::size_t(i) * m, t.data() + std::size_t(i) * m,
                  t.data() + std::size_t(pairing[i]) * m, lambda, m);
  return out;
}

// adjoint of mix_batch: g_plain[i] = lambda*g[i] + (1-lambda)*g[pinv[i]]
template <class T>
Tensor<T> unmix_grad(const Tensor<T>& g, T lambda,
                     const std::vector<int>& pairing) {
  std::vector<int> pinv(pairing.size());
  for (std::size_t i = 0; i < pairing.size(); ++i) pinv[pairing[i]] = int(i);
  Tensor<T> out(g.n, g.c, g.x, g.y, g.z);
  const std::size_t m = std::size_t(g.c) * g.spatial();
  for (int i = 0; i < g.n; ++i)
    kernels::lerp(out.data() + std::size_t(i) * m, g.data() + std::size_t(i) * m,
                  g.data() + std::size_t(pinv[i]) * m, lambda, m);
  return out;
}

}  // namespace renalparse
