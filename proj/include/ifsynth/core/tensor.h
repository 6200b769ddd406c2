#pragma once

#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ifsynth {

using i64 = std::int64_t;

// Dense row-major tensor of doubles. Shape conventions used throughout:
// images {H,W}, channel stacks {C,H,W}, matrices {M,N}, flat vectors {N}.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(count(shape), 0.0) {}
  Tensor(std::vector<int> s, double fill) : shape(std::move(s)), data(count(shape), fill) {}
  Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    assert((i64)data.size() == count(shape));
  }

  static i64 count(const std::vector<int>& s) {
    i64 n = 1;
    for (int d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor full(std::vector<int> s, double v) { return Tensor(std::move(s), v); }
  static Tensor scalar(double v) { return Tensor({1}, std::vector<double>{v}); }

  i64 numel() const { return (i64)data.size(); }
  int dim(int i) const { return shape[(size_t)i]; }
  int rank() const { return (int)shape.size(); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }

  double& operator[](i64 i) { return data[(size_t)i]; }
  double operator[](i64 i) const { return data[(size_t)i]; }

  // {H,W}
  double& at(int y, int x) { return data[(size_t)((i64)y * shape[1] + x)]; }
  double at(int y, int x) const { return data[(size_t)((i64)y * shape[1] + x)]; }
  // {C,H,W}
  double& at(int c, int y, int x) {
    return data[(size_t)(((i64)c * shape[1] + y) * shape[2] + x)];
  }
  double at(int c, int y, int x) const {
    return data[(size_t)(((i64)c * shape[1] + y) * shape[2] + x)];
  }

  // View of channel c of a {C,H,W} stack as a copied {H,W} image.
  Tensor channel(int c) const {
    assert(rank() == 3);
    i64 hw = (i64)shape[1] * shape[2];
    Tensor out({shape[1], shape[2]});
    const double* src = ptr() + c * hw;
    std::copy(src, src + hw, out.ptr());
    return out;
  }

  void set_channel(int c, const Tensor& img) {
    assert(rank() == 3 && img.rank() == 2);
    assert(img.shape[0] == shape[1] && img.shape[1] == shape[2]);
    i64 hw = (i64)shape[1] * shape[2];
    std::copy(img.ptr(), img.ptr() + hw, ptr() + c * hw);
  }

  bool operator==(const Tensor& o) const { return shape == o.shape && data == o.data; }
};

}  // namespace ifsynth
