// AVX2/FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; it is entered only after the runtime capability check
// in kernels.cpp.

#include "renalparse/kernels.hpp"

#if RENALPARSE_X86

#include <immintrin.h>

namespace renalparse::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// ---------------------------------------------------------------- float --

void axpy_f32(float* dst, const float* src, float a, std::size_t n) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 d = _mm256_loadu_ps(dst + i);
    d = _mm256_fmadd_ps(va, _mm256_loadu_ps(src + i), d);
    _mm256_storeu_ps(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += a * src[i];
}

void lerp_f32(float* dst, const float* a, const float* b, float t,
              std::size_t n) {
  const __m256 vt = _mm256_set1_ps(t);
  const __m256 vu = _mm256_set1_ps(1.0f - t);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 r = _mm256_mul_ps(vu, _mm256_loadu_ps(b + i));
    r = _mm256_fmadd_ps(vt, _mm256_loadu_ps(a + i), r);
    _mm256_storeu_ps(dst + i, r);
  }
  for (; i < n; ++i) dst[i] = t * a[i] + (1.0f - t) * b[i];
}

void axpy3_f32(float* dst, const float* s0, const float* s1, const float* s2,
               float a0, float a1, float a2, std::size_t n) {
  const __m256 v0 = _mm256_set1_ps(a0);
  const __m256 v1 = _mm256_set1_ps(a1);
  const __m256 v2 = _mm256_set1_ps(a2);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 d = _mm256_loadu_ps(dst + i);
    d = _mm256_fmadd_ps(v0, _mm256_loadu_ps(s0 + i), d);
    d = _mm256_fmadd_ps(v1, _mm256_loadu_ps(s1 + i), d);
    d = _mm256_fmadd_ps(v2, _mm256_loadu_ps(s2 + i), d);
    _mm256_storeu_ps(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += a0 * s0[i] + a1 * s1[i] + a2 * s2[i];
}

void dot3_f32(const float* g, const float* s0, const float* s1,
              const float* s2, std::size_t n, double out[3]) {
  __m256d d0 = _mm256_setzero_pd(), d1 = _mm256_setzero_pd(),
          d2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // widen once, reuse for all three products
    const __m256d gv = _mm256_cvtps_pd(_mm_loadu_ps(g + i));
    d0 = _mm256_fmadd_pd(gv, _mm256_cvtps_pd(_mm_loadu_ps(s0 + i)), d0);
    d1 = _mm256_fmadd_pd(gv, _mm256_cvtps_pd(_mm_loadu_ps(s1 + i)), d1);
    d2 = _mm256_fmadd_pd(gv, _mm256_cvtps_pd(_mm_loadu_ps(s2 + i)), d2);
  }
  double r0 = hsum(d0), r1 = hsum(d1), r2 = hsum(d2);
  for (; i < n; ++i) {
    const double gi = double(g[i]);
    r0 += gi * double(s0[i]);
    r1 += gi * double(s1[i]);
    r2 += gi * double(s2[i]);
  }
  out[0] += r0;
  out[1] += r1;
  out[2] += r2;
}

double dot_f32(const float* a, const float* b, std::size_t n) {
  // widen to double before multiplying so the products match the scalar
  // reference exactly; only the summation order differs
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 va = _mm256_loadu_ps(a + i);
    __m256 vb = _mm256_loadu_ps(b + i);
    acc0 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                           _mm256_cvtps_pd(_mm256_castps256_ps128(vb)), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                           _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += double(a[i]) * double(b[i]);
  return acc;
}

double sum_f32(const float* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
    acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += double(x[i]);
  return acc;
}

void moments_f32(const float* x, std::size_t n, double& s, double& s2) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  __m256d b0 = _mm256_setzero_pd(), b1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    a0 = _mm256_add_pd(a0, lo);
    a1 = _mm256_add_pd(a1, hi);
    b0 = _mm256_fmadd_pd(lo, lo, b0);
    b1 = _mm256_fmadd_pd(hi, hi, b1);
  }
  double sa = hsum(_mm256_add_pd(a0, a1));
  double sb = hsum(_mm256_add_pd(b0, b1));
  for (; i < n; ++i) {
    const double v = double(x[i]);
    sa += v;
    sb += v * v;
  }
  s = sa;
  s2 = sb;
}

void relu_f32(float* dst, const float* src, std::size_t n) {
  const __m256 z = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(dst + i, _mm256_max_ps(_mm256_loadu_ps(src + i), z));
  for (; i < n; ++i) dst[i] = src[i] > 0.0f ? src[i] : 0.0f;
}

void relu_backward_f32(float* din, const float* dout, const float* pre,
                       std::size_t n) {
  const __m256 z = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(pre + i), z, _CMP_GT_OQ);
    __m256 g = _mm256_and_ps(_mm256_loadu_ps(dout + i), mask);
    _mm256_storeu_ps(din + i, _mm256_add_ps(_mm256_loadu_ps(din + i), g));
  }
  for (; i < n; ++i)
    if (pre[i] > 0.0f) din[i] += dout[i];
}

void scale_shift_f32(float* dst, const float* src, float a, float b,
                     std::size_t n) {
  const __m256 va = _mm256_set1_ps(a);
  const __m256 vb = _mm256_set1_ps(b);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(dst + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(src + i), vb));
  for (; i < n; ++i) dst[i] = a * src[i] + b;
}

void add_f32(float* dst, const float* a, const float* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(
        dst + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) dst[i] = a[i] + b[i];
}

float min_dist_sq_f32(float px, float py, float pz, const float* xs,
                      const float* ys, const float* zs, std::size_t n) {
  const __m256 vx = _mm256_set1_ps(px);
  const __m256 vy = _mm256_set1_ps(py);
  const __m256 vz = _mm256_set1_ps(pz);
  __m256 best = _mm256_set1_ps(3.4e38f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 dx = _mm256_sub_ps(_mm256_loadu_ps(xs + i), vx);
    __m256 dy = _mm256_sub_ps(_mm256_loadu_ps(ys + i), vy);
    __m256 dz = _mm256_sub_ps(_mm256_loadu_ps(zs + i), vz);
    __m256 d = _mm256_mul_ps(dx, dx);
    d = _mm256_fmadd_ps(dy, dy, d);
    d = _mm256_fmadd_ps(dz, dz, d);
    best = _mm256_min_ps(best, d);
  }
  float lanes[8];
  _mm256_storeu_ps(lanes, best);
  float out = lanes[0];
  for (int k = 1; k < 8; ++k) out = lanes[k] < out ? lanes[k] : out;
  if (i == 0) out = 3.4e38f;
  for (; i < n; ++i) {
    const float dx = xs[i] - px, dy = ys[i] - py, dz = zs[i] - pz;
    const float d = dx * dx + dy * dy + dz * dz;
    if (d < out) out = d;
  }
  return out;
}

// --------------------------------------------------------------- double --

void axpy_f64(double* dst, const double* src, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_loadu_pd(dst + i);
    d = _mm256_fmadd_pd(va, _mm256_loadu_pd(src + i), d);
    _mm256_storeu_pd(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += a * src[i];
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double out = hsum(acc);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

double sum_f64(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double out = hsum(acc);
  for (; i < n; ++i) out += x[i];
  return out;
}

void moments_f64(const double* x, std::size_t n, double& s, double& s2) {
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    a = _mm256_add_pd(a, v);
    b = _mm256_fmadd_pd(v, v, b);
  }
  double sa = hsum(a), sb = hsum(b);
  for (; i < n; ++i) {
    sa += x[i];
    sb += x[i] * x[i];
  }
  s = sa;
  s2 = sb;
}

double min_dist_sq_f64(double px, double py, double pz, const double* xs,
                       const double* ys, const double* zs, std::size_t n) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  const __m256d vz = _mm256_set1_pd(pz);
  __m256d best = _mm256_set1_pd(1.7e308);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy);
    __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vz);
    __m256d d = _mm256_mul_pd(dx, dx);
    d = _mm256_fmadd_pd(dy, dy, d);
    d = _mm256_fmadd_pd(dz, dz, d);
    best = _mm256_min_pd(best, d);
  }
  double lanes[4];
  _mm256_storeu_pd(lanes, best);
  double out = lanes[0];
  for (int k = 1; k < 4; ++k) out = lanes[k] < out ? lanes[k] : out;
  if (i == 0) out = 1.7e308;
  for (; i < n; ++i) {
    const double dx = xs[i] - px, dy = ys[i] - py, dz = zs[i] - pz;
    const double d = dx * dx + dy * dy + dz * dz;
    if (d < out) out = d;
  }
  return out;
}

}  // namespace

void fill_table(Table<float>& t) {
  t.axpy = &axpy_f32;
  t.lerp = &lerp_f32;
  t.axpy3 = &axpy3_f32;
  t.dot3 = &dot3_f32;
  t.dot = &dot_f32;
  t.sum = &sum_f32;
  t.moments = &moments_f32;
  t.relu = &relu_f32;
  t.relu_backward = &relu_backward_f32;
  t.scale_shift = &scale_shift_f32;
  t.add = &add_f32;
  t.min_dist_sq = &min_dist_sq_f32;
}

void fill_table(Table<double>& t) {
  t.axpy = &axpy_f64;
  t.dot = &dot_f64;
  t.sum = &sum_f64;
  t.moments = &moments_f64;
  t.min_dist_sq = &min_dist_sq_f64;
}

}  // namespace renalparse::kernels::avx2

#endif  // RENALPARSE_X86
