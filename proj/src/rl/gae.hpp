#pragma once

#include <cstdint>
#include <vector>

namespace aep::rl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values (lambda-returns)
};

// Generalized advantage estimation over one environment's T-step slice.
// `values` holds V(s_0..s_{T-1}); `bootstrap` is V(s_T). When `episodic` is
// false the done flags are ignored for bootstrapping, so value estimates flow
// across episode boundaries (used for the intrinsic reward stream).
GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              double bootstrap, const std::vector<std::uint8_t>& dones, double gamma,
              double lambda, bool episodic);

}  // namespace aep::rl
