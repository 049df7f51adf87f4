#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nn/tensor.hpp"

namespace aep::nn {

enum class Init { He, Xavier };

// A layer owns its parameters and the gradient buffers Adam consumes.
// forward() caches whatever backward() needs; backward() accumulates
// parameter gradients and returns the gradient w.r.t. its input.
// All tensors carry a leading batch dimension.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  // Per-sample output shape (no batch dim) for a per-sample input shape.
  virtual std::vector<int> output_shape(const std::vector<int>& in) const = 0;

  virtual Tensor forward(const Tensor& x) = 0;
  virtual Tensor backward(const Tensor& dy) = 0;

  virtual std::vector<Tensor*> params() { return {}; }
  virtual std::vector<Tensor*> param_grads() { return {}; }
  virtual void zero_grads();
};

// 2-D convolution, valid padding, square kernel, configurable stride.
// Input [N, C, H, W], weights [out_c, in_c * k * k].
class Conv2d : public Layer {
 public:
  Conv2d(int in_c, int out_c, int ksize, int stride, Init init, std::mt19937_64& rng);

  std::string kind() const override { return "conv2d"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override;
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Tensor*> params() override { return {&w_, &b_}; }
  std::vector<Tensor*> param_grads() override { return {&dw_, &db_}; }

  Tensor& weights() { return w_; }
  Tensor& bias() { return b_; }

 private:
  void im2col(const double* x, double* col) const;

  int in_c_, out_c_, k_, stride_;
  int in_h_ = 0, in_w_ = 0, out_h_ = 0, out_w_ = 0;
  Tensor w_, b_, dw_, db_;
  // im2col of the last forward batch, [n][in_c*k*k][out_h*out_w]; backward
  // reuses it for the weight gradient instead of rebuilding the columns.
  std::vector<double> col_cache_;
  std::vector<double> dcol_;
  int n_cache_ = 0;
  bool has_cache_ = false;
};

// Fully connected: y = x W^T + b, weights [out, in].
class Dense : public Layer {
 public:
  Dense(int in, int out, Init init, std::mt19937_64& rng);

  std::string kind() const override { return "dense"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override;
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Tensor*> params() override { return {&w_, &b_}; }
  std::vector<Tensor*> param_grads() override { return {&dw_, &db_}; }

  Tensor& weights() { return w_; }
  Tensor& bias() { return b_; }

 private:
  int in_, out_;
  Tensor w_, b_, dw_, db_;
  Tensor x_cache_;
  bool has_cache_ = false;
};

class Relu : public Layer {
 public:
  std::string kind() const override { return "relu"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override { return in; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

 private:
  std::vector<std::uint8_t> mask_;
  std::vector<int> shape_cache_;
};

class Flatten : public Layer {
 public:
  std::string kind() const override { return "flatten"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override;
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

 private:
  std::vector<int> shape_cache_;
};

// Row-wise softmax over the last (and only) feature dimension of [N, C].
class Softmax : public Layer {
 public:
  std::string kind() const override { return "softmax"; }
  std::vector<int> output_shape(const std::vector<int>& in) const override { return in; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

 private:
  Tensor y_cache_;
  bool has_cache_ = false;
};

double uniform_init_limit(Init init, int fan_in, int fan_out);

}  // namespace aep::nn
