#pragma once

#include <cstdint>
#include <vector>

#include "rl/policy.hpp"

namespace aep::rl {

struct PPOConfig {
  double lr = 2.5e-4;
  double clip = 0.1;
  double entropy_coef = 0.01;
  int minibatches = 4;
  double gamma = 0.99;
  double lambda = 0.95;
  int epochs = 4;
  double value_coef = 0.5;
  double c_ext = 2.0;
  double c_int = 1.0;
  double kl_stop = 0.5;

  void validate() const;  // throws ConfigError on out-of-range values
};

// Flattened rollout of `steps` x `envs` transitions, laid out step-major
// (index = t * envs + i). Advantages and returns are precomputed per stream.
struct RolloutBatch {
  int steps = 0;
  int envs = 0;
  nn::Tensor frames;  // [steps*envs, 1, 84, 84]
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> adv_ext, adv_int;
  std::vector<double> ret_ext, ret_int;

  std::size_t size() const { return actions.size(); }
  void validate() const;  // throws ConfigError on inconsistent shapes
};

struct PPOStats {
  double policy_loss = 0.0;
  double value_loss_ext = 0.0;
  double value_loss_int = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int minibatches_done = 0;
  bool early_stopped = false;
  bool skipped_step = false;  // any Adam update skipped on non-finite grads
};

// Clipped-surrogate objective for one sample (the quantity being maximized).
inline double clipped_objective(double ratio, double advantage, double clip) {
  const double lo = 1.0 - clip, hi = 1.0 + clip;
  const double clipped = ratio < lo ? lo : (ratio > hi ? hi : ratio);
  const double a = ratio * advantage;
  const double b = clipped * advantage;
  return a < b ? a : b;
}

// In-place standardization to zero mean / unit population std (guarded by
// +1e-8), as applied to each minibatch's combined advantages.
void standardize(std::vector<double>& v);

// Total PPO loss of one minibatch (policy + value + entropy terms) given the
// already-standardized combined advantages. With `with_grads`, parameter
// gradients are accumulated on the policy (no optimizer step is taken).
// `idx` selects rows of the batch. Exposed for gradient verification.
double ppo_minibatch_loss(PolicyNet& policy, const RolloutBatch& batch,
                          const std::vector<int>& idx, const std::vector<double>& adv_std,
                          const PPOConfig& cfg, bool with_grads, PPOStats* stats);

// 4 epochs x 4 minibatches (per config) of clipped-surrogate Adam updates.
// Minibatch order reshuffles each epoch from `shuffle_state`. Stops early if
// the approximate KL to the rollout policy exceeds cfg.kl_stop. Returned
// stats are averaged over the minibatches actually processed.
PPOStats ppo_update(PolicyNet& policy, const RolloutBatch& batch, const PPOConfig& cfg,
                    std::uint64_t& shuffle_state);

}  // namespace aep::rl
