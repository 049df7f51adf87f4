#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nn/layers.hpp"

namespace aep::nn {

struct AdamConfig {
  double lr = 2.5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Feed-forward stack built layer by layer. Owns parameters, gradients and
// Adam moments; save/load round-trips weights bit-exactly.
class Network {
 public:
  Network(std::uint64_t seed, std::vector<int> input_shape);

  Network& add_conv2d(int out_c, int ksize, int stride, Init init = Init::He);
  Network& add_dense(int out, Init init = Init::Xavier);
  Network& add_relu();
  Network& add_flatten();
  Network& add_softmax();

  // x is [n, ...input_shape]; throws ConfigError on mismatch.
  Tensor forward(const Tensor& x);
  // dy matches the last forward's output; accumulates parameter grads and
  // returns the gradient w.r.t. the input.
  Tensor backward(const Tensor& dy);
  void zero_grads();

  // Applies one Adam update from accumulated grads (scaled by grad_scale),
  // then zeroes them. If any gradient is non-finite the update is skipped
  // and a warning is printed; returns false in that case.
  bool adam_step(const AdamConfig& cfg, double grad_scale = 1.0);

  std::int64_t param_count() const;
  std::int64_t adam_steps() const { return adam_t_; }
  const std::vector<int>& input_shape() const { return input_shape_; }
  const std::vector<int>& output_shape() const { return cur_shape_; }

  std::vector<Tensor*> params();
  std::vector<Tensor*> param_grads();

  // Weights go to <path>.bin (little-endian float64, layer order), shapes and
  // the optimizer step counter to <path>.json.
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  std::vector<int> input_shape_;
  std::vector<int> cur_shape_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::mt19937_64 rng_;

  std::vector<Tensor> adam_m_;
  std::vector<Tensor> adam_v_;
  std::int64_t adam_t_ = 0;
  bool moments_ready_ = false;
  bool forward_done_ = false;

  void ensure_moments();
};

}  // namespace aep::nn
