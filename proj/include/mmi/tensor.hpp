#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mmi {

using real = double;

inline int64_t numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

/// Dense row-major tensor of doubles. Conventions used throughout:
/// planes are [H,W], images [C,H,W], batches [N,C,H,W], matrices [R,C].
struct Tensor {
  std::vector<int> shape;
  std::vector<real> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s, real fill = 0.0)
      : shape(std::move(s)), data(static_cast<size_t>(numel(shape)), fill) {}

  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape); }

  int ndim() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(data.size()); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool empty() const { return data.empty(); }

  real* ptr() { return data.data(); }
  const real* ptr() const { return data.data(); }

  real& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
  real operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

  // [H,W]
  real& at(int h, int w) { return data[static_cast<size_t>(h * dim(1) + w)]; }
  real at(int h, int w) const { return data[static_cast<size_t>(h * dim(1) + w)]; }
  // [C,H,W]
  real& at(int c, int h, int w) {
    return data[(static_cast<size_t>(c) * dim(1) + h) * dim(2) + w];
  }
  real at(int c, int h, int w) const {
    return data[(static_cast<size_t>(c) * dim(1) + h) * dim(2) + w];
  }
  // [N,C,H,W]
  real& at(int n, int c, int h, int w) {
    return data[((static_cast<size_t>(n) * dim(1) + c) * dim(2) + h) * dim(3) + w];
  }
  real at(int n, int c, int h, int w) const {
    return data[((static_cast<size_t>(n) * dim(1) + c) * dim(2) + h) * dim(3) + w];
  }
};

/// Image alias: [C,H,W] with values in [0,1].
using Image = Tensor;

}  // namespace mmi
