#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "common/error.hpp"

namespace aep::nn {

// Dense row-major float64 tensor. Train-time precision is 64-bit throughout;
// desk scale makes speed irrelevant and keeps gradient checks tight.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape)
      : shape_(std::move(shape)), data_(checked_numel(shape_), 0.0) {}

  Tensor(std::vector<int> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != checked_numel(shape_))
      throw ConfigError("tensor data length does not match shape");
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  // Multi-index access for tests and small code paths.
  double& at(std::initializer_list<int> idx) { return data_[offset(idx)]; }
  double at(std::initializer_list<int> idx) const { return data_[offset(idx)]; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  // Same data, new shape; element count must match.
  Tensor reshaped(std::vector<int> shape) const {
    if (checked_numel(shape) != numel())
      throw ConfigError("reshape changes element count");
    return Tensor(std::move(shape), data_);
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  static std::int64_t checked_numel(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw ConfigError("tensor dims must be positive");
      n *= d;
    }
    return n;
  }

 private:
  std::size_t offset(std::initializer_list<int> idx) const {
    std::size_t off = 0;
    std::size_t i = 0;
    for (int v : idx) {
      off = off * static_cast<std::size_t>(shape_[i]) + static_cast<std::size_t>(v);
      ++i;
    }
    return off;
  }

  std::vector<int> shape_;
  std::vector<double> data_;
};

}  // namespace aep::nn
