#pragma once
// Data-parallel inner loops used by the network layers, the optimizers and
// the surface-distance metrics. Every kernel has a scalar reference
// implementation (templated on float/double) and may have an AVX2 variant;
// the variant table is chosen once at startup from CPU capabilities.
//
// Reductions accumulate in double on every path so that the scalar and the
// vector variants stay within a few ulp of each other.

#include <cstddef>
#include <cstdint>

namespace renalparse::kernels {

enum class Isa { scalar, avx2 };

// Detected once at first use. RENALPARSE_FORCE_SCALAR=1 in the environment
// disables vector variants (used by the equivalence tests).
Isa active_isa();
const char* isa_name(Isa isa);

namespace ref {

// dst[i] += a * src[i]
template <class T>
inline void axpy(T* dst, const T* src, T a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

// dst[i] = t*a[i] + (1-t)*b[i]   (mixup interpolation)
template <class T>
inline void lerp(T* dst, const T* a, const T* b, T t, std::size_t n) {
  const T u = T(1) - t;
  for (std::size_t i = 0; i < n; ++i) dst[i] = t * a[i] + u * b[i];
}

// dst[i] += a0*s0[i] + a1*s1[i] + a2*s2[i]   (conv row stencil)
template <class T>
inline void axpy3(T* dst, const T* s0, const T* s1, const T* s2, T a0, T a1,
                  T a2, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    dst[i] += a0 * s0[i] + a1 * s1[i] + a2 * s2[i];
}

// out[k] += sum_i g[i]*sk[i] for the three shifted rows (conv weight grad)
template <class T>
inline void dot3(const T* g, const T* s0, const T* s1, const T* s2,
                 std::size_t n, double out[3]) {
  double d0 = 0, d1 = 0, d2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = double(g[i]);
    d0 += gi * double(s0[i]);
    d1 += gi * double(s1[i]);
    d2 += gi * double(s2[i]);
  }
  out[0] += d0;
  out[1] += d1;
  out[2] += d2;
}

template <class T>
inline double dot(const T* a, const T* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += double(a[i]) * double(b[i]);
  return acc;
}

template <class T>
inline double sum(const T* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += double(x[i]);
  return acc;
}

// sum and sum of squares in one pass
template <class T>
inline void moments(const T* x, std::size_t n, double& s, double& s2) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = double(x[i]);
    a += v;
    b += v * v;
  }
  s = a;
  s2 = b;
}

template <class T>
inline void relu(T* dst, const T* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > T(0) ? src[i] : T(0);
}

// din[i] += dout[i] * (pre[i] > 0)
template <class T>
inline void relu_backward(T* din, const T* dout, const T* pre, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (pre[i] > T(0)) din[i] += dout[i];
}

// dst[i] = a*src[i] + b   (instance-norm normalize/affine, z-score)
template <class T>
inline void scale_shift(T* dst, const T* src, T a, T b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a * src[i] + b;
}

template <class T>
inline void add(T* dst, const T* a, const T* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

// squared Euclidean distance from point p to the nearest of n points given
// as separate coordinate arrays (mm space); n must be >= 1
template <class T>
inline T min_dist_sq(T px, T py, T pz, const T* xs, const T* ys, const T* zs,
                     std::size_t n) {
  T best = (xs[0] - px) * (xs[0] - px) + (ys[0] - py) * (ys[0] - py) +
           (zs[0] - pz) * (zs[0] - pz);
  for (std::size_t i = 1; i < n; ++i) {
    const T dx = xs[i] - px, dy = ys[i] - py, dz = zs[i] - pz;
    const T d = dx * dx + dy * dy + dz * dz;
    if (d < best) best = d;
  }
  return best;
}

}  // namespace ref

// Dispatch table, one per scalar type. Entries not covered by a vector
// variant point at the scalar reference.
template <class T>
struct Table {
  void (*axpy)(T*, const T*, T, std::size_t);
  void (*lerp)(T*, const T*, const T*, T, std::size_t);
  void (*axpy3)(T*, const T*, const T*, const T*, T, T, T, std::size_t);
  void (*dot3)(const T*, const T*, const T*, const T*, std::size_t, double[3]);
  double (*dot)(const T*, const T*, std::size_t);
  double (*sum)(const T*, std::size_t);
  void (*moments)(const T*, std::size_t, double&, double&);
  void (*relu)(T*, const T*, std::size_t);
  void (*relu_backward)(T*, const T*, const T*, std::size_t);
  void (*scale_shift)(T*, const T*, T, T, std::size_t);
  void (*add)(T*, const T*, const T*, std::size_t);
  T (*min_dist_sq)(T, T, T, const T*, const T*, const T*, std::size_t);
};

const Table<float>& table_f32();
const Table<double>& table_f64();

template <class T>
inline const Table<T>& table() {
  if constexpr (sizeof(T) == sizeof(float))
    return table_f32();
  else
    return table_f64();
}

// Convenience wrappers used throughout the layers.
template <class T>
inline void axpy(T* dst, const T* src, T a, std::size_t n) {
  table<T>().axpy(dst, src, a, n);
}
template <class T>
inline void lerp(T* dst, const T* a, const T* b, T t, std::size_t n) {
  table<T>().lerp(dst, a, b, t, n);
}
template <class T>
inline void axpy3(T* dst, const T* s0, const T* s1, const T* s2, T a0, T a1,
                  T a2, std::size_t n) {
  table<T>().axpy3(dst, s0, s1, s2, a0, a1, a2, n);
}
template <class T>
inline void dot3(const T* g, const T* s0, const T* s1, const T* s2,
                 std::size_t n, double out[3]) {
  table<T>().dot3(g, s0, s1, s2, n, out);
}
template <class T>
inline double dot(const T* a, const T* b, std::size_t n) {
  return table<T>().dot(a, b, n);
}
template <class T>
inline double sum(const T* x, std::size_t n) {
  return table<T>().sum(x, n);
}
template <class T>
inline void moments(const T* x, std::size_t n, double& s, double& s2) {
  table<T>().moments(x, n, s, s2);
}
template <class T>
inline void relu(T* dst, const T* src, std::size_t n) {
  table<T>().relu(dst, src, n);
}
template <class T>
inline void relu_backward(T* din, const T* dout, const T* pre, std::size_t n) {
  table<T>().relu_backward(din, dout, pre, n);
}
template <class T>
inline void scale_shift(T* dst, const T* src, T a, T b, std::size_t n) {
  table<T>().scale_shift(dst, src, a, b, n);
}
template <class T>
inline void add(T* dst, const T* a, const T* b, std::size_t n) {
  table<T>().add(dst, a, b, n);
}
template <class T>
inline T min_dist_sq(T px, T py, T pz, const T* xs, const T* ys, const T* zs,
                     std::size_t n) {
  return table<T>().min_dist_sq(px, py, pz, xs, ys, zs, n);
}

#if defined(__x86_64__) || defined(_M_X64)
#define RENALPARSE_X86 1
namespace avx2 {
void fill_table(Table<float>& t);
void fill_table(Table<double>& t);
}  // namespace avx2
#else
#define RENALPARSE_X86 0
#endif

}  // namespace renalparse::kernels
