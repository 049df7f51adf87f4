#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "intrinsic/module.hpp"
#include "rl/ppo.hpp"

namespace aep::harness {

// Everything a single run needs, readable from one flat key-value file.
// Unknown keys are rejected at parse time; resolved_text() round-trips the
// complete configuration for provenance.
struct ExperimentConfig {
  std::string env = "billiard";  // billiard | coin_dense | coin_sparse | line
  std::string method = "aep";    // aep | rnd | icm | sndreg | cluster | none

  std::int64_t total_steps = 200000;  // env steps summed over parallel envs
  int num_envs = 8;
  int rollout_steps = 128;

  // Advantage weighting of the two reward streams.
  double ext_coef = 2.0;
  double int_coef = 1.0;

  // Policy optimization.
  double lr = 2.5e-4;
  double clip = 0.1;
  double entropy_coef = 0.01;
  double gamma = 0.99;
  double lambda = 0.95;
  double value_coef = 0.5;
  double kl_stop = 0.5;
  int epochs = 4;
  int minibatches = 4;

  // Intrinsic module.
  std::int64_t phase1_budget = 10000;  // stage-1 interaction cap (agent steps)
  int warmup_clips = 200;
  int no_growth_window = 2000;
  int k_min = 4;
  int k_max = 32;
  int min_corpus = 50;
  int module_epochs = 4;
  int module_minibatch = 64;
  double module_lr = 2.5e-4;
  bool audio_features = false;

  // Ablations.
  bool random_collection = false;  // aep only: uniform actions while stage 1 runs
  bool random_policy = false;      // none only: uniform actions for the whole run

  // Optional early stop once the trailing mean episode return reaches the
  // threshold (NaN disables).
  double stop_at_return = std::numeric_limits<double>::quiet_NaN();
  int stop_window = 50;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_text(const std::string& text);

  void validate() const;  // throws ConfigError
  std::string resolved_text(std::uint64_t seed) const;

  rl::PPOConfig ppo_config() const;
  intrinsic::ModuleOptions module_options() const;
  std::int64_t iterations() const;  // ceil(total_steps / (num_envs * rollout_steps))
};

struct RunResult {
  std::int64_t steps = 0;
  std::int64_t iterations = 0;
  bool stopped_early = false;
  std::int64_t first_reward_step = -1;     // global env step of the first extrinsic reward
  std::int64_t phase2_start_step = -1;     // aep only
  int frozen_k = 0;                        // aep event classes (without silence)
  double final_return = 0.0;               // mean episode return, last quarter
  double mean_center_distance = 0.0;       // pairwise distance of frozen centers
};

// Executes one (method, seed) experiment and fills `out_dir` with
// config.resolved, log.csv, timing.csv, summary.json, checkpoints and (for
// aep) the frozen event classes. Deterministic given (config, seed). An
// aborted run (e.g. silent environment) writes abort.txt and rethrows.
RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         const std::string& out_dir, const std::string& dump_audio_dir = "");

}  // namespace aep::harness
