#include "intrinsic/normalizer.hpp"

#include <cmath>

#include <json.hpp>

#include "common/error.hpp"

namespace aep::intrinsic {

RewardNormalizer::RewardNormalizer(int num_envs, double gamma) : gamma_(gamma) {
  if (num_envs < 1) throw ConfigError("normalizer: need at least one env");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("normalizer: gamma must be in [0, 1)");
  returns_.assign(static_cast<std::size_t>(num_envs), 0.0);
}

double RewardNormalizer::normalize(int env_idx, double r) {
  if (env_idx < 0 || env_idx >= static_cast<int>(returns_.size()))
    throw InputError("normalizer: env index out of range");
  if (!std::isfinite(r)) throw InputError("normalizer: non-finite reward");
  double& ret = returns_[static_cast<std::size_t>(env_idx)];
  ret = gamma_ * ret + r;
  ++count_;
  const double delta = ret - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (ret - mean_);
  if (count_ < 2) return r;
  return r / (std() + 1e-8);
}

void RewardNormalizer::reset() {
  std::fill(returns_.begin(), returns_.end(), 0.0);
  count_ = 0;
  mean_ = 0.0;
  m2_ = 0.0;
}

double RewardNormalizer::std() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(m2_ / static_cast<double>(count_));
}

std::string RewardNormalizer::serialize() const {
  nlohmann::json j;
  j["gamma"] = gamma_;
  j["returns"] = returns_;
  j["count"] = count_;
  j["mean"] = mean_;
  j["m2"] = m2_;
  return j.dump();
}

RewardNormalizer RewardNormalizer::deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("normalizer state parse failure: ") + e.what());
  }
  try {
    RewardNormalizer norm(static_cast<int>(j.at("returns").size()), j.at("gamma").get<double>());
    norm.returns_ = j.at("returns").get<std::vector<double>>();
    norm.count_ = j.at("count").get<std::int64_t>();
    norm.mean_ = j.at("mean").get<double>();
    norm.m2_ = j.at("m2").get<double>();
    return norm;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("normalizer state missing field: ") + e.what());
  }
}

}  // namespace aep::intrinsic
