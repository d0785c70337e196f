#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "ikc/common.hpp"

namespace ikc {

// Dense row-major tensor. Images and feature maps use shape {c, h, w},
// vectors use shape {n}. Deliberately minimal; heavy math goes through
// Eigen::Map views of the flat buffer.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> s) : shape(std::move(s)), data(count(shape), T(0)) {}
  TensorT(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {}

  static size_t count(const std::vector<int>& s) {
    size_t n = 1;
    for (int d : s) n *= size_t(d);
    return n;
  }

  size_t numel() const { return data.size(); }
  bool empty() const { return data.empty(); }

  int dim(int i) const { return shape[size_t(i)]; }

  // {c,h,w} accessors
  int channels() const { return shape.at(0); }
  int height() const { return shape.at(1); }
  int width() const { return shape.at(2); }

  T& at(int c, int y, int x) {
    return data[(size_t(c) * shape[1] + size_t(y)) * shape[2] + size_t(x)];
  }
  const T& at(int c, int y, int x) const {
    return data[(size_t(c) * shape[1] + size_t(y)) * shape[2] + size_t(x)];
  }

  T& operator[](size_t i) { return data[i]; }
  const T& operator[](size_t i) const { return data[i]; }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  void zero() { fill(T(0)); }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }

  template <typename U>
  TensorT<U> cast() const {
    TensorT<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

using TensorF = TensorT<float>;
using TensorD = TensorT<double>;

}  // namespace ikc
