#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aep::intrinsic {

// Scales intrinsic rewards by the running standard deviation of a per-env
// discounted return proxy (ret <- gamma * ret + r), the usual trick that
// makes reward magnitudes comparable across methods. Rewards pass through
// unscaled until two proxy samples exist.
class RewardNormalizer {
 public:
  explicit RewardNormalizer(int num_envs, double gamma = 0.8);

  // Feeds r into env_idx's return proxy, updates the running variance with
  // the new proxy value and returns r / (std + 1e-8).
  double normalize(int env_idx, double r);

  // Forgets everything but the env count (used at the phase boundary).
  void reset();

  std::int64_t count() const { return count_; }
  double std() const;

  std::string serialize() const;
  static RewardNormalizer deserialize(const std::string& text);

 private:
  double gamma_;
  std::vector<double> returns_;
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace aep::intrinsic
