#include "renalparse/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace renalparse::kernels {

namespace {

bool force_scalar() {
  const char* env = std::getenv("RENALPARSE_FORCE_SCALAR");
  return env != nullptr && std::strcmp(env, "0") != 0;
}

Isa detect() {
  if (force_scalar()) return Isa::scalar;
#if RENALPARSE_X86
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Isa::avx2;
#endif
  return Isa::scalar;
}

template <class T>
Table<T> make_table() {
  Table<T> t;
  t.axpy = &ref::axpy<T>;
  t.lerp = &ref::lerp<T>;
  t.axpy3 = &ref::axpy3<T>;
  t.dot3 = &ref::dot3<T>;
  t.dot = &ref::dot<T>;
  t.sum = &ref::sum<T>;
  t.moments = &ref::moments<T>;
  t.relu = &ref::relu<T>;
  t.relu_backward = &ref::relu_backward<T>;
  t.scale_shift = &ref::scale_shift<T>;
  t.add = &ref::add<T>;
  t.min_dist_sq = &ref::min_dist_sq<T>;
#if RENALPARSE_X86
  if (active_isa() == Isa::avx2) avx2::fill_table(t);
#endif
  return t;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    default:
      return "scalar";
  }
}

const Table<float>& table_f32() {
  static const Table<float> t = make_table<float>();
  return t;
}

const Table<double>& table_f64() {
  static const Table<double> t = make_table<double>();
  return t;
}

}  // namespace renalparse::kernels
