#include "rl/policy.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "env/env.hpp"
#include "nn/losses.hpp"

namespace aep::rl {

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t part) {
  return derive_seed(seed, 0x50ULL + part);
}

}  // namespace

PolicyNet::PolicyNet(std::uint64_t seed, int action_count)
    : action_count_(action_count),
      trunk_(sub_seed(seed, 0), {1, env::kFrameSize, env::kFrameSize}),
      pi_head_(sub_seed(seed, 1), {256}),
      vext_head_(sub_seed(seed, 2), {256}),
      vint_head_(sub_seed(seed, 3), {256}) {
  if (action_count < 1) throw ConfigError("PolicyNet: action_count must be >= 1");
  trunk_.add_conv2d(16, 3, 2).add_relu();
  trunk_.add_conv2d(32, 3, 2).add_relu();
  trunk_.add_conv2d(32, 3, 2).add_relu();
  trunk_.add_conv2d(32, 3, 2).add_relu();
  trunk_.add_flatten();  // 32 * 4 * 4 = 512
  trunk_.add_dense(256, nn::Init::He).add_relu();
  pi_head_.add_dense(action_count, nn::Init::Xavier);
  vext_head_.add_dense(1, nn::Init::Xavier);
  vint_head_.add_dense(1, nn::Init::Xavier);
}

PolicyOutput PolicyNet::forward(const nn::Tensor& frames) {
  const nn::Tensor features = trunk_.forward(frames);
  last_batch_ = features.dim(0);
  PolicyOutput out{pi_head_.forward(features), {}, {}};
  const nn::Tensor ve = vext_head_.forward(features);
  const nn::Tensor vi = vint_head_.forward(features);
  out.v_ext.assign(ve.data(), ve.data() + ve.numel());
  out.v_int.assign(vi.data(), vi.data() + vi.numel());
  if (!out.logits.all_finite())
    throw StateError("PolicyNet: non-finite logits");
  return out;
}

void PolicyNet::backward(const nn::Tensor& dlogits, const std::vector<double>& dv_ext,
                         const std::vector<double>& dv_int) {
  if (last_batch_ == 0) throw StateError("PolicyNet: backward before forward");
  const int n = last_batch_;
  nn::Tensor dfeat({n, 256});
  {
    const nn::Tensor d = pi_head_.backward(dlogits);
    for (std::int64_t i = 0; i < d.numel(); ++i) dfeat.data()[i] += d.data()[i];
  }
  auto add_head = [&](nn::Network& head, const std::vector<double>& dv) {
    if (dv.empty()) return;
    if (static_cast<int>(dv.size()) != n)
      throw ConfigError("PolicyNet: value gradient batch mismatch");
    nn::Tensor dvt({n, 1});
    std::copy(dv.begin(), dv.end(), dvt.data());
    const nn::Tensor d = head.backward(dvt);
    for (std::int64_t i = 0; i < d.numel(); ++i) dfeat.data()[i] += d.data()[i];
  };
  add_head(vext_head_, dv_ext);
  add_head(vint_head_, dv_int);
  trunk_.backward(dfeat);
}

void PolicyNet::zero_grads() {
  trunk_.zero_grads();
  pi_head_.zero_grads();
  vext_head_.zero_grads();
  vint_head_.zero_grads();
}

bool PolicyNet::adam_step(const nn::AdamConfig& cfg) {
  bool ok = true;
  ok &= trunk_.adam_step(cfg);
  ok &= pi_head_.adam_step(cfg);
  ok &= vext_head_.adam_step(cfg);
  ok &= vint_head_.adam_step(cfg);
  return ok;
}

std::int64_t PolicyNet::param_count() const {
  return trunk_.param_count() + pi_head_.param_count() + vext_head_.param_count() +
         vint_head_.param_count();
}

std::vector<nn::Tensor*> PolicyNet::params() {
  std::vector<nn::Tensor*> out;
  for (nn::Network* net : {&trunk_, &pi_head_, &vext_head_, &vint_head_})
    for (nn::Tensor* t : net->params()) out.push_back(t);
  return out;
}

std::vector<nn::Tensor*> PolicyNet::param_grads() {
  std::vector<nn::Tensor*> out;
  for (nn::Network* net : {&trunk_, &pi_head_, &vext_head_, &vint_head_})
    for (nn::Tensor* t : net->param_grads()) out.push_back(t);
  return out;
}

void PolicyNet::save(const std::string& prefix) const {
  trunk_.save(prefix + ".trunk");
  pi_head_.save(prefix + ".pi");
  vext_head_.save(prefix + ".vext");
  vint_head_.save(prefix + ".vint");
}

void PolicyNet::load(const std::string& prefix) {
  trunk_.load(prefix + ".trunk");
  pi_head_.load(prefix + ".pi");
  vext_head_.load(prefix + ".vext");
  vint_head_.load(prefix + ".vint");
}

void sample_actions(const nn::Tensor& logits, std::uint64_t& rng_state,
                    std::vector<int>& actions, std::vector<double>& log_probs) {
  if (logits.rank() != 2) throw ConfigError("sample_actions: logits must be [n, actions]");
  const int n = logits.dim(0);
  const int c = logits.dim(1);
  const nn::Tensor logp = nn::log_softmax(logits);
  actions.resize(n);
  log_probs.resize(n);
  for (int i = 0; i < n; ++i) {
    const double* row = logp.data() + static_cast<std::size_t>(i) * c;
    const double u = static_cast<double>(splitmix64(rng_state) >> 11) * 0x1.0p-53;
    double acc = 0.0;
    int choice = c - 1;  // guards against round-off leaving u above the total
    for (int j = 0; j < c; ++j) {
      acc += std::exp(row[j]);
      if (u < acc) {
        choice = j;
        break;
      }
    }
    actions[i] = choice;
    log_probs[i] = row[choice];
  }
}

std::vector<int> greedy_actions(const nn::Tensor& logits) {
  if (logits.rank() != 2) throw ConfigError("greedy_actions: logits must be [n, actions]");
  const int n = logits.dim(0);
  const int c = logits.dim(1);
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) {
    const double* row = logits.data() + static_cast<std::size_t>(i) * c;
    int best = 0;
    for (int j = 1; j < c; ++j)
      if (row[j] > row[best]) best = j;
    out[i] = best;
  }
  return out;
}

}  // namespace aep::rl
