#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nn/network.hpp"

namespace aep::rl {

struct PolicyOutput {
  nn::Tensor logits;           // [n, action_count]
  std::vector<double> v_ext;   // [n]
  std::vector<double> v_int;   // [n]
};

// Actor-critic network: a shared conv encoder and dense trunk feeding an
// action-logits head plus separate value heads for the extrinsic and
// intrinsic return streams.
class PolicyNet {
 public:
  PolicyNet(std::uint64_t seed, int action_count);

  int action_count() const { return action_count_; }

  // frames is [n, 1, 84, 84]. Caches activations for a following backward().
  PolicyOutput forward(const nn::Tensor& frames);

  // Gradients of a scalar loss w.r.t. the latest forward's outputs. dv_* may
  // be empty to skip that head.
  void backward(const nn::Tensor& dlogits, const std::vector<double>& dv_ext,
                const std::vector<double>& dv_int);

  void zero_grads();
  // One Adam update across trunk and heads; false if skipped on bad grads.
  bool adam_step(const nn::AdamConfig& cfg);
  std::int64_t adam_steps() const { return trunk_.adam_steps(); }
  std::int64_t param_count() const;

  std::vector<nn::Tensor*> params();
  std::vector<nn::Tensor*> param_grads();

  // Writes <prefix>.{trunk,pi,vext,vint}.{json,bin}.
  void save(const std::string& prefix) const;
  void load(const std::string& prefix);

 private:
  int action_count_;
  nn::Network trunk_;
  nn::Network pi_head_;
  nn::Network vext_head_;
  nn::Network vint_head_;
  int last_batch_ = 0;
};

// Samples one action per row of `logits` by inverse-CDF over the softmax
// probabilities, advancing `rng_state` (splitmix64). Fills per-row sampled
// actions and their log-probabilities.
void sample_actions(const nn::Tensor& logits, std::uint64_t& rng_state,
                    std::vector<int>& actions, std::vector<double>& log_probs);

// Argmax per row; ties resolve to the lowest action id.
std::vector<int> greedy_actions(const nn::Tensor& logits);

}  // namespace aep::rl
