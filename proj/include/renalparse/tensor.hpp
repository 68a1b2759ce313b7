#pragma once
// Dense 5-d tensor (batch, channel, x, y, z) used by the networks.
// Memory layout: x is the contiguous axis, matching the NIfTI voxel order,
// so a volume channel copies into a tensor channel with one memcpy.
// Index: ((((n*C + c)*Z + z)*Y + y)*X + x.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace renalparse {

template <class T>
struct Tensor {
  int n = 0, c = 0, x = 0, y = 0, z = 0;
  std::vector<T> v;

  Tensor() = default;
  Tensor(int n_, int c_, int x_, int y_, int z_)
      : n(n_), c(c_), x(x_), y(y_), z(z_) {
    if (n < 0 || c < 0 || x < 0 || y < 0 || z < 0)
      throw std::invalid_argument("tensor: negative dimension");
    v.assign(size(), T(0));
  }

  std::size_t size() const {
    return std::size_t(n) * c * std::size_t(x) * y * z;
  }
  std::size_t spatial() const { return std::size_t(x) * y * z; }

  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && x == o.x && y == o.y && z == o.z;
  }
  std::string shape_str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
           std::to_string(x) + "," + std::to_string(y) + "," +
           std::to_string(z) + ")";
  }

  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  std::size_t offset(int nn, int cc, int xx, int yy, int zz) const {
    return ((((std::size_t(nn) * c + cc) * z + zz) * y + yy) * x) + xx;
  }
  T& at(int nn, int cc, int xx, int yy, int zz) {
    return v[offset(nn, cc, xx, yy, zz)];
  }
  T at(int nn, int cc, int xx, int yy, int zz) const {
    return v[offset(nn, cc, xx, yy, zz)];
  }

  // start of the contiguous x-row (nn, cc, :, yy, zz)
  T* row(int nn, int cc, int yy, int zz) {
    return v.data() + offset(nn, cc, 0, yy, zz);
  }
  const T* row(int nn, int cc, int yy, int zz) const {
    return v.data() + offset(nn, cc, 0, yy, zz);
  }

  // start of the contiguous spatial block (nn, cc, :, :, :)
  T* chan(int nn, int cc) { return v.data() + offset(nn, cc, 0, 0, 0); }
  const T* chan(int nn, int cc) const {
    return v.data() + offset(nn, cc, 0, 0, 0);
  }

  void zero() { std::fill(v.begin(), v.end(), T(0)); }
};

// Batch of label indices, one channel implied.
struct LabelTensor {
  int n = 0, x = 0, y = 0, z = 0;
  std::vector<std::uint8_t> v;

  LabelTensor() = default;
  LabelTensor(int n_, int x_, int y_, int z_) : n(n_), x(x_), y(y_), z(z_) {
    v.assign(size(), 0);
  }
  std::size_t size() const { return std::size_t(n) * x * std::size_t(y) * z; }
  std::size_t spatial() const { return std::size_t(x) * y * z; }
  std::size_t offset(int nn, int xx, int yy, int zz) const {
    return (((std::size_t(nn) * z + zz) * y + yy) * x) + xx;
  }
  std::uint8_t& at(int nn, int xx, int yy, int zz) {
    return v[offset(nn, xx, yy, zz)];
  }
  std::uint8_t at(int nn, int xx, int yy, int zz) const {
    return v[offset(nn, xx, yy, zz)];
  }
};

}  // namespace renalparse
