#pragma once
// Deterministic random streams. The engine is std::mt19937_64 (bit-exact by
// the standard); the distributions are coded here so draws do not depend on
// the standard library implementation.

#include <cmath>
#include <cstdint>
#include <random>

namespace renalparse {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Independent stream derived from (base, id); parallel workers that each
  // own a stream reproduce serial results bit-for-bit.
  static Rng substream(std::uint64_t base, std::uint64_t id) {
    return Rng(mix(base, id));
  }

  std::uint64_t next_u64() { return eng_(); }

  // [0,1)
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // [0,n)
  int uniform_int(int n) {
    // modulo bias is < 2^-40 for any n that fits this codebase
    return int(eng_() % std::uint64_t(n));
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Beta(a,b). Johnk in log space for a,b <= 1 (covers the mixup alpha=0.1
  // case with ~98% acceptance), gamma ratio otherwise.
  double beta(double a, double b) {
    if (a <= 1.0 && b <= 1.0) {
      for (;;) {
        const double lx = std::log(positive_uniform()) / a;
        const double ly = std::log(positive_uniform()) / b;
        const double m = lx > ly ? lx : ly;
        const double ls = m + std::log(std::exp(lx - m) + std::exp(ly - m));
        if (ls <= 0.0) return std::exp(lx - ls);
      }
    }
    const double gx = gamma(a);
    const double gy = gamma(b);
    return gx / (gx + gy);
  }

  // Gamma(shape, 1), Marsaglia-Tsang with the shape<1 boost.
  double gamma(double shape) {
    if (shape < 1.0)
      return gamma(shape + 1.0) * std::pow(positive_uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = positive_uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

 private:
  double positive_uniform() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return u;
  }

  // splitmix64-style mixer
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9E3779B97F4A7C15ull * (b + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
  }

  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace renalparse
