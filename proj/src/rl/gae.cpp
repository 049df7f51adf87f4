#include "rl/gae.hpp"

#include "common/error.hpp"

namespace aep::rl {

GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              double bootstrap, const std::vector<std::uint8_t>& dones, double gamma,
              double lambda, bool episodic) {
  const std::size_t t_len = rewards.size();
  if (t_len == 0) throw InputError("gae: empty reward sequence");
  if (values.size() != t_len || dones.size() != t_len)
    throw ConfigError("gae: rewards, values and dones must have equal length");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gae: gamma must be in (0, 1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("gae: lambda must be in [0, 1]");

  GaeResult out;
  out.advantages.resize(t_len);
  out.returns.resize(t_len);

  double carry = 0.0;
  for (std::size_t i = t_len; i-- > 0;) {
    const double mask = (episodic && dones[i]) ? 0.0 : 1.0;
    const double next_v = (i + 1 < t_len) ? values[i + 1] : bootstrap;
    const double delta = rewards[i] + gamma * next_v * mask - values[i];
    carry = delta + gamma * lambda * mask * carry;
    out.advantages[i] = carry;
    out.returns[i] = carry + values[i];
  }
  return out;
}

}  // namespace aep::rl
