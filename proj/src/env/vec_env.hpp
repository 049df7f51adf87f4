#pragma once

#include "env/env.hpp"

namespace aep::env {

// Sequentially stepped bundle of environments with auto-reset: when an env
// finishes, its true final observation is preserved in info.final_obs and
// the slot's observation is replaced by a fresh reset. Reset seeds derive
// deterministically from the per-env base seed and episode index.
class VecEnv {
 public:
  VecEnv(std::vector<std::unique_ptr<Env>> envs, std::vector<std::uint64_t> base_seeds);

  int size() const { return static_cast<int>(envs_.size()); }
  Env& env(int i) { return *envs_[static_cast<std::size_t>(i)]; }
  const Env& env(int i) const { return *envs_[static_cast<std::size_t>(i)]; }

  std::vector<Observation> reset_all();
  std::vector<StepResult> step(const std::vector<int>& actions);

 private:
  std::vector<std::unique_ptr<Env>> envs_;
  std::vector<std::uint64_t> base_seeds_;
  std::vector<std::uint64_t> episode_index_;
};

}  // namespace aep::env
