#include "rl/ppo.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "nn/losses.hpp"

namespace aep::rl {

void PPOConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("ppo: gamma must be in (0, 1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("ppo: lambda must be in [0, 1]");
  if (!(clip > 0.0)) throw ConfigError("ppo: clip must be positive");
  if (!(lr > 0.0)) throw ConfigError("ppo: lr must be positive");
  if (minibatches < 1) throw ConfigError("ppo: minibatches must be >= 1");
  if (epochs < 1) throw ConfigError("ppo: epochs must be >= 1");
  if (entropy_coef < 0.0 || value_coef < 0.0)
    throw ConfigError("ppo: loss coefficients must be >= 0");
  if (c_ext < 0.0 || c_int < 0.0) throw ConfigError("ppo: advantage coefficients must be >= 0");
  if (!(kl_stop > 0.0)) throw ConfigError("ppo: kl_stop must be positive");
}

void RolloutBatch::validate() const {
  const std::size_t n = static_cast<std::size_t>(steps) * static_cast<std::size_t>(envs);
  if (steps < 1 || envs < 1) throw ConfigError("rollout: steps and envs must be >= 1");
  if (actions.size() != n || log_probs.size() != n || adv_ext.size() != n ||
      adv_int.size() != n || ret_ext.size() != n || ret_int.size() != n)
    throw ConfigError("rollout: field lengths do not match steps * envs");
  if (frames.rank() != 4 || frames.dim(0) != static_cast<int>(n))
    throw ConfigError("rollout: frames must be [steps*envs, c, h, w]");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(log_probs[i]) || !std::isfinite(adv_ext[i]) ||
        !std::isfinite(adv_int[i]) || !std::isfinite(ret_ext[i]) || !std::isfinite(ret_int[i]))
      throw InputError("rollout: non-finite scalar field");
  }
}

void standardize(std::vector<double>& v) {
  if (v.empty()) return;
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& x : v) x = (x - mean) * inv;
}

double ppo_minibatch_loss(PolicyNet& policy, const RolloutBatch& batch,
                          const std::vector<int>& idx, const std::vector<double>& adv_std,
                          const PPOConfig& cfg, bool with_grads, PPOStats* stats) {
  const int m = static_cast<int>(idx.size());
  if (m == 0) throw InputError("ppo: empty minibatch");
  if (adv_std.size() != idx.size()) throw ConfigError("ppo: advantage slice mismatch");

  const std::size_t row = static_cast<std::size_t>(batch.frames.numel()) /
                          static_cast<std::size_t>(batch.frames.dim(0));
  nn::Tensor mb_frames({m, batch.frames.dim(1), batch.frames.dim(2), batch.frames.dim(3)});
  for (int i = 0; i < m; ++i)
    std::memcpy(mb_frames.data() + static_cast<std::size_t>(i) * row,
                batch.frames.data() + static_cast<std::size_t>(idx[i]) * row,
                row * sizeof(double));

  const PolicyOutput out = policy.forward(mb_frames);
  const int c = out.logits.dim(1);
  const nn::Tensor logp = nn::log_softmax(out.logits);
  const std::vector<double> ent = nn::entropy_from_logits(out.logits);

  double policy_loss = 0.0, entropy = 0.0, kl = 0.0, clip_frac = 0.0;
  double vloss_ext = 0.0, vloss_int = 0.0;
  nn::Tensor dlogits;
  std::vector<double> dv_ext, dv_int;
  if (with_grads) {
    dlogits = nn::Tensor({m, c});
    dv_ext.resize(m);
    dv_int.resize(m);
  }

  const double inv_m = 1.0 / m;
  for (int i = 0; i < m; ++i) {
    const int g = idx[i];
    const int a = batch.actions[g];
    if (a < 0 || a >= c) throw InputError("ppo: action out of range");
    const double* lp_row = logp.data() + static_cast<std::size_t>(i) * c;
    const double logp_new = lp_row[a];
    const double ratio = std::exp(logp_new - batch.log_probs[g]);
    const double adv = adv_std[i];

    policy_loss -= clipped_objective(ratio, adv, cfg.clip) * inv_m;
    entropy += ent[i] * inv_m;
    kl += (batch.log_probs[g] - logp_new) * inv_m;
    if (std::fabs(ratio - 1.0) > cfg.clip) clip_frac += inv_m;

    const double ve = out.v_ext[i], vi = out.v_int[i];
    vloss_ext += 0.5 * (ve - batch.ret_ext[g]) * (ve - batch.ret_ext[g]) * inv_m;
    vloss_int += 0.5 * (vi - batch.ret_int[g]) * (vi - batch.ret_int[g]) * inv_m;

    if (with_grads) {
      const bool in_band = ratio >= 1.0 - cfg.clip && ratio <= 1.0 + cfg.clip;
      const double clipped = std::min(std::max(ratio, 1.0 - cfg.clip), 1.0 + cfg.clip);
      const bool flows = in_band || ratio * adv < clipped * adv;
      double* dz = dlogits.data() + static_cast<std::size_t>(i) * c;
      for (int j = 0; j < c; ++j) {
        const double p = std::exp(lp_row[j]);
        if (flows) {
          const double onehot = (j == a) ? 1.0 : 0.0;
          dz[j] -= adv * ratio * (onehot - p) * inv_m;  // d(-surrogate)
        }
        dz[j] += cfg.entropy_coef * p * (lp_row[j] + ent[i]) * inv_m;  // d(-coef * H)
      }
      dv_ext[i] = cfg.value_coef * (ve - batch.ret_ext[g]) * inv_m;
      dv_int[i] = cfg.value_coef * (vi - batch.ret_int[g]) * inv_m;
    }
  }

  if (with_grads) policy.backward(dlogits, dv_ext, dv_int);

  if (stats) {
    stats->policy_loss = policy_loss;
    stats->value_loss_ext = vloss_ext;
    stats->value_loss_int = vloss_int;
    stats->entropy = entropy;
    stats->clip_fraction = clip_frac;
    stats->approx_kl = kl;
  }
  return policy_loss - cfg.entropy_coef * entropy + cfg.value_coef * (vloss_ext + vloss_int);
}

PPOStats ppo_update(PolicyNet& policy, const RolloutBatch& batch, const PPOConfig& cfg,
                    std::uint64_t& shuffle_state) {
  cfg.validate();
  batch.validate();
  const int n = static_cast<int>(batch.size());
  if (n < cfg.minibatches) throw ConfigError("ppo: batch smaller than minibatch count");

  std::vector<double> combined(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    combined[i] = cfg.c_ext * batch.adv_ext[i] + cfg.c_int * batch.adv_int[i];

  std::vector<int> perm(batch.size());
  std::iota(perm.begin(), perm.end(), 0);

  nn::AdamConfig adam;
  adam.lr = cfg.lr;

  PPOStats total;
  for (int epoch = 0; epoch < cfg.epochs && !total.early_stopped; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(splitmix64(shuffle_state) % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[i], perm[j]);
    }
    for (int b = 0; b < cfg.minibatches; ++b) {
      const int lo = static_cast<int>(static_cast<std::int64_t>(b) * n / cfg.minibatches);
      const int hi = static_cast<int>(static_cast<std::int64_t>(b + 1) * n / cfg.minibatches);
      const std::vector<int> idx(perm.begin() + lo, perm.begin() + hi);
      std::vector<double> adv(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) adv[k] = combined[idx[k]];
      standardize(adv);

      PPOStats mb;
      policy.zero_grads();
      ppo_minibatch_loss(policy, batch, idx, adv, cfg, true, &mb);
      if (mb.approx_kl > cfg.kl_stop) {
        std::fprintf(stderr, "warning: ppo early stop, approx KL %.3f > %.3f\n", mb.approx_kl,
                     cfg.kl_stop);
        policy.zero_grads();
        total.early_stopped = true;
        break;
      }
      if (!policy.adam_step(adam)) total.skipped_step = true;

      total.policy_loss += mb.policy_loss;
      total.value_loss_ext += mb.value_loss_ext;
      total.value_loss_int += mb.value_loss_int;
      total.entropy += mb.entropy;
      total.clip_fraction += mb.clip_fraction;
      total.approx_kl += mb.approx_kl;
      ++total.minibatches_done;
    }
  }

  if (total.minibatches_done > 0) {
    const double inv = 1.0 / total.minibatches_done;
    total.policy_loss *= inv;
    total.value_loss_ext *= inv;
    total.value_loss_int *= inv;
    total.entropy *= inv;
    total.clip_fraction *= inv;
    total.approx_kl *= inv;
  }
  return total;
}

}  // namespace aep::rl
