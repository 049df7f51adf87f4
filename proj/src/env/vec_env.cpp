#include "env/vec_env.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"
#include "env/billiard.hpp"
#include "env/coin.hpp"
#include "env/line.hpp"

namespace aep::env {

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "billiard") return std::make_unique<BilliardWorld>();
  if (name == "coin_dense") return std::make_unique<CoinWorld>(false);
  if (name == "coin_sparse") return std::make_unique<CoinWorld>(true);
  if (name == "line") return std::make_unique<LineWorld>();
  throw ConfigError("unknown env: " + name);
}

VecEnv::VecEnv(std::vector<std::unique_ptr<Env>> envs, std::vector<std::uint64_t> base_seeds)
    : envs_(std::move(envs)), base_seeds_(std::move(base_seeds)) {
  if (envs_.empty()) throw ConfigError("vec env: no environments");
  if (envs_.size() != base_seeds_.size())
    throw ConfigError("vec env: seed count must match env count");
  for (const auto& e : envs_)
    if (!e) throw ConfigError("vec env: null environment");
  episode_index_.assign(envs_.size(), 0);
}

std::vector<Observation> VecEnv::reset_all() {
  std::vector<Observation> obs;
  obs.reserve(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    episode_index_[i] = 0;
    obs.push_back(envs_[i]->reset(aep::derive_seed(base_seeds_[i], 0)));
  }
  return obs;
}

std::vector<StepResult> VecEnv::step(const std::vector<int>& actions) {
  if (actions.size() != envs_.size())
    throw ConfigError("vec env: action count must match env count");
  std::vector<StepResult> out;
  out.reserve(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    StepResult res = envs_[i]->step(actions[i]);
    if (res.done) {
      res.info.final_obs = std::move(res.obs);
      res.obs = envs_[i]->reset(aep::derive_seed(base_seeds_[i], ++episode_index_[i]));
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace aep::env
