#include <doctest.h>

#include <cmath>
#include <vector>

#include "renalparse/kernels.hpp"
#include "renalparse/rng.hpp"

using namespace renalparse;
namespace k = renalparse::kernels;

namespace {

std::vector<float> random_vec(std::size_t n, Rng& rng, double lo = -1.0,
                              double hi = 1.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform(lo, hi));
  return v;
}

const std::size_t kSizes[] = {0, 1, 3, 7, 8, 9, 31, 64, 1000, 4097};

}  // namespace

// The dispatched table and the scalar reference must agree on every kernel.
// When AVX2 is not active both sides run the same code and the checks are
// trivially exact.
TEST_CASE("kernel equivalence: elementwise float kernels") {
  Rng rng(42);
  for (const std::size_t n : kSizes) {
    auto a = random_vec(n, rng), b = random_vec(n, rng);

    auto d1 = random_vec(n, rng);
    auto d2 = d1;
    k::axpy(d1.data(), a.data(), 0.37f, n);
    k::ref::axpy(d2.data(), a.data(), 0.37f, n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-6));

    std::vector<float> l1(n), l2(n);
    k::lerp(l1.data(), a.data(), b.data(), 0.25f, n);
    k::ref::lerp(l2.data(), a.data(), b.data(), 0.25f, n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(l1[i] == doctest::Approx(l2[i]).epsilon(1e-6));

    std::vector<float> r1(n), r2(n);
    k::relu(r1.data(), a.data(), n);
    k::ref::relu(r2.data(), a.data(), n);
    CHECK(r1 == r2);

    auto g1 = random_vec(n, rng);
    auto g2 = g1;
    k::relu_backward(g1.data(), b.data(), a.data(), n);
    k::ref::relu_backward(g2.data(), b.data(), a.data(), n);
    CHECK(g1 == g2);

    std::vector<float> s1(n), s2(n);
    k::scale_shift(s1.data(), a.data(), 1.7f, -0.3f, n);
    k::ref::scale_shift(s2.data(), a.data(), 1.7f, -0.3f, n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(s1[i] == doctest::Approx(s2[i]).epsilon(1e-6));

    std::vector<float> t1(n), t2(n);
    k::add(t1.data(), a.data(), b.data(), n);
    k::ref::add(t2.data(), a.data(), b.data(), n);
    CHECK(t1 == t2);

    auto c = random_vec(n, rng);
    auto f1 = random_vec(n, rng);
    auto f2 = f1;
    k::axpy3(f1.data(), a.data(), b.data(), c.data(), 0.2f, -0.5f, 1.1f, n);
    k::ref::axpy3(f2.data(), a.data(), b.data(), c.data(), 0.2f, -0.5f, 1.1f,
                  n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(f1[i] == doctest::Approx(f2[i]).epsilon(1e-5));
  }
}

TEST_CASE("kernel equivalence: reductions") {
  Rng rng(7);
  for (const std::size_t n : kSizes) {
    auto a = random_vec(n, rng), b = random_vec(n, rng);

    CHECK(k::dot(a.data(), b.data(), n) ==
          doctest::Approx(k::ref::dot(a.data(), b.data(), n)).epsilon(1e-12));
    CHECK(k::sum(a.data(), n) ==
          doctest::Approx(k::ref::sum(a.data(), n)).epsilon(1e-12));

    double s1, q1, s2, q2;
    k::moments(a.data(), n, s1, q1);
    k::ref::moments(a.data(), n, s2, q2);
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
    CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));

    auto c = random_vec(n, rng);
    double t1[3] = {0, 0, 0}, t2[3] = {0, 0, 0};
    k::dot3(a.data(), b.data(), c.data(), a.data(), n, t1);
    k::ref::dot3(a.data(), b.data(), c.data(), a.data(), n, t2);
    for (int j = 0; j < 3; ++j)
      CHECK(t1[j] == doctest::Approx(t2[j]).epsilon(1e-12));
  }
}

TEST_CASE("kernel equivalence: min_dist_sq, float and double") {
  Rng rng(11);
  for (const std::size_t n : {std::size_t(1), std::size_t(5), std::size_t(8),
                              std::size_t(13), std::size_t(1024)}) {
    auto xs = random_vec(n, rng, -10, 10), ys = random_vec(n, rng, -10, 10),
         zs = random_vec(n, rng, -10, 10);
    const float r1 = k::min_dist_sq(0.5f, -0.25f, 1.0f, xs.data(), ys.data(),
                                    zs.data(), n);
    const float r2 = k::ref::min_dist_sq(0.5f, -0.25f, 1.0f, xs.data(),
                                         ys.data(), zs.data(), n);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-6));

    std::vector<double> dx(xs.begin(), xs.end()), dy(ys.begin(), ys.end()),
        dz(zs.begin(), zs.end());
    const double q1 =
        k::min_dist_sq(0.5, -0.25, 1.0, dx.data(), dy.data(), dz.data(), n);
    const double q2 = k::ref::min_dist_sq(0.5, -0.25, 1.0, dx.data(),
                                          dy.data(), dz.data(), n);
    CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));
  }
}

TEST_CASE("kernel sanity: hand values") {
  float dst[4] = {1, 2, 3, 4};
  const float src[4] = {10, 20, 30, 40};
  k::axpy(dst, src, 0.5f, 4);
  CHECK(dst[0] == 6.0f);
  CHECK(dst[3] == 24.0f);

  const float a[2] = {2, 4}, b[2] = {10, 0};
  float out[2];
  k::lerp(out, a, b, 1.0f, 2);
  CHECK(out[0] == 2.0f);
  k::lerp(out, a, b, 0.0f, 2);
  CHECK(out[0] == 10.0f);

  CHECK(k::dot(a, b, 2) == doctest::Approx(20.0));
  CHECK(k::min_dist_sq(0.0, 0.0, 0.0, (const double[]){3.0},
                       (const double[]){4.0}, (const double[]){0.0},
                       1) == doctest::Approx(25.0));
}
