#include "intrinsic/baselines.hpp"

#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "env/env.hpp"
#include "intrinsic/aep_module.hpp"
#include "nn/losses.hpp"

namespace aep::intrinsic {

namespace {

constexpr int kConvOut = 2592;   // 32 x 9 x 9 after three stride-2 convs on 84x84
constexpr int kFeatDim = 128;
constexpr double kIcmBeta = 0.2;  // forward-loss weight against the inverse loss

void add_conv_stack(nn::Network& net) {
  net.add_conv2d(16, 3, 2).add_relu();
  net.add_conv2d(32, 3, 2).add_relu();
  net.add_conv2d(32, 3, 2).add_relu();
  net.add_flatten();
}

// Minibatch copy of selected rows; view() must be taken after the storage
// stops moving.
struct OwnedBatch {
  nn::Tensor frames;
  nn::Tensor next_frames;
  std::vector<int> actions;
  std::vector<audio::SoundTexture> textures;
  std::vector<std::uint8_t> silent;

  ModuleBatch view() {
    ModuleBatch b;
    b.frames = frames.numel() > 0 ? &frames : nullptr;
    b.next_frames = next_frames.numel() > 0 ? &next_frames : nullptr;
    b.actions = actions;
    b.textures = textures;
    b.silent = silent;
    return b;
  }
};

OwnedBatch gather(const ModuleBatch& b, const std::vector<int>& idx) {
  OwnedBatch out;
  const int m = static_cast<int>(idx.size());
  auto copy_rows = [&](const nn::Tensor* src, nn::Tensor& dst) {
    if (src == nullptr) return;
    const std::size_t row =
        static_cast<std::size_t>(src->numel()) / static_cast<std::size_t>(src->dim(0));
    dst = nn::Tensor({m, src->dim(1), src->dim(2), src->dim(3)});
    for (int i = 0; i < m; ++i)
      std::memcpy(dst.data() + static_cast<std::size_t>(i) * row,
                  src->data() + static_cast<std::size_t>(idx[i]) * row, row * sizeof(double));
  };
  copy_rows(b.frames, out.frames);
  copy_rows(b.next_frames, out.next_frames);
  out.actions.reserve(idx.size());
  out.textures.reserve(idx.size());
  out.silent.reserve(idx.size());
  for (int g : idx) {
    out.actions.push_back(b.actions[static_cast<std::size_t>(g)]);
    out.textures.push_back(b.textures[static_cast<std::size_t>(g)]);
    out.silent.push_back(b.silent[static_cast<std::size_t>(g)]);
  }
  return out;
}

// Runs fn over shuffled minibatches for the configured number of epochs.
template <typename Fn>
void for_each_minibatch(int n, int epochs, int minibatch, std::uint64_t& shuffle_state, Fn fn) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int e = 0; e < epochs; ++e) {
    for (int i = n - 1; i > 0; --i) {
      const int j =
          static_cast<int>(splitmix64(shuffle_state) % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[i], perm[j]);
    }
    for (int lo = 0; lo < n; lo += minibatch) {
      const int hi = std::min(n, lo + minibatch);
      fn(std::vector<int>(perm.begin() + lo, perm.begin() + hi));
    }
  }
}

void append_onehot(double* dst, int action, int action_count) {
  if (action < 0 || action >= action_count) throw InputError("module: action out of range");
  dst[action] = 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// RND

RndModule::RndModule(std::uint64_t seed, const ModuleOptions& opt)
    : opt_(opt),
      aux_dim_(opt.audio_features ? audio::kTextureDim : 0),
      target_enc_(derive_seed(seed, 0xB0), {1, env::kFrameSize, env::kFrameSize}),
      target_head_(derive_seed(seed, 0xB1), {kConvOut + aux_dim_}),
      pred_enc_(derive_seed(seed, 0xB2), {1, env::kFrameSize, env::kFrameSize}),
      pred_head_(derive_seed(seed, 0xB3), {kConvOut + aux_dim_}),
      shuffle_state_(derive_seed(seed, seed_stream::kMinibatchShuffle) ^ 0xB9ULL) {
  add_conv_stack(target_enc_);
  target_head_.add_dense(kFeatDim, nn::Init::Xavier);
  add_conv_stack(pred_enc_);
  pred_head_.add_dense(kFeatDim, nn::Init::Xavier);
}

nn::Tensor RndModule::embed(nn::Network& enc, nn::Network& head, const ModuleBatch& batch,
                            nn::Tensor* head_in_out) {
  if (batch.next_frames == nullptr) throw ConfigError("rnd: batch lacks next_frames");
  const nn::Tensor feats = enc.forward(*batch.next_frames);
  const int n = feats.dim(0);
  nn::Tensor head_in({n, kConvOut + aux_dim_});
  for (int i = 0; i < n; ++i) {
    double* dst = head_in.data() + static_cast<std::size_t>(i) * (kConvOut + aux_dim_);
    std::memcpy(dst, feats.data() + static_cast<std::size_t>(i) * kConvOut,
                sizeof(double) * kConvOut);
    if (aux_dim_ > 0) {
      const auto& phi = batch.textures[static_cast<std::size_t>(i)].features;
      std::memcpy(dst + kConvOut, phi.data(), sizeof(double) * aux_dim_);
    }
  }
  if (head_in_out != nullptr) *head_in_out = head_in;
  return head.forward(head_in);
}

std::vector<double> RndModule::rewards(const ModuleBatch& batch) {
  batch.validate();
  const nn::Tensor t = embed(target_enc_, target_head_, batch, nullptr);
  const nn::Tensor p = embed(pred_enc_, pred_head_, batch, nullptr);
  const int n = t.dim(0);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < kFeatDim; ++j) {
      const double d = p.at({i, j}) - t.at({i, j});
      s += d * d;
    }
    out[static_cast<std::size_t>(i)] = s / kFeatDim;
  }
  return out;
}

void RndModule::update(const ModuleBatch& batch) {
  batch.validate();
  nn::AdamConfig adam;
  adam.lr = opt_.lr;
  for_each_minibatch(batch.size(), opt_.train_epochs, opt_.minibatch, shuffle_state_,
                     [&](const std::vector<int>& idx) {
    OwnedBatch ob = gather(batch, idx);
    const ModuleBatch mb = ob.view();
    const int m = mb.size();
    const nn::Tensor t = embed(target_enc_, target_head_, mb, nullptr);
    const nn::Tensor p = embed(pred_enc_, pred_head_, mb, nullptr);
    pred_enc_.zero_grads();
    pred_head_.zero_grads();
    nn::Tensor dp({m, kFeatDim});
    const double scale = 2.0 / (static_cast<double>(m) * kFeatDim);
    for (std::int64_t i = 0; i < dp.numel(); ++i) dp[i] = scale * (p[i] - t[i]);
    const nn::Tensor dhead_in = pred_head_.backward(dp);
    nn::Tensor dfeat({m, kConvOut});
    for (int i = 0; i < m; ++i)
      std::memcpy(dfeat.data() + static_cast<std::size_t>(i) * kConvOut,
                  dhead_in.data() + static_cast<std::size_t>(i) * (kConvOut + aux_dim_),
                  sizeof(double) * kConvOut);
    pred_enc_.backward(dfeat);
    pred_enc_.adam_step(adam);
    pred_head_.adam_step(adam);
  });
}

void RndModule::sync_predictor_to_target() {
  const auto src_e = target_enc_.params();
  const auto dst_e = pred_enc_.params();
  for (std::size_t i = 0; i < src_e.size(); ++i) *dst_e[i] = *src_e[i];
  const auto src_h = target_head_.params();
  const auto dst_h = pred_head_.params();
  for (std::size_t i = 0; i < src_h.size(); ++i) *dst_h[i] = *src_h[i];
}

void RndModule::save(const std::string& prefix) const {
  target_enc_.save(prefix + ".tenc");
  target_head_.save(prefix + ".thead");
  pred_enc_.save(prefix + ".penc");
  pred_head_.save(prefix + ".phead");
}

void RndModule::load(const std::string& prefix) {
  target_enc_.load(prefix + ".tenc");
  target_head_.load(prefix + ".thead");
  pred_enc_.load(prefix + ".penc");
  pred_head_.load(prefix + ".phead");
}

// ---------------------------------------------------------------------------
// ICM

IcmModule::IcmModule(std::uint64_t seed, int action_count, const ModuleOptions& opt)
    : opt_(opt),
      action_count_(action_count),
      aux_dim_(opt.audio_features ? audio::kTextureDim : 0),
      feat_(derive_seed(seed, 0xB4), {1, env::kFrameSize, env::kFrameSize}),
      inverse_(derive_seed(seed, 0xB5), {2 * kFeatDim}),
      forward_(derive_seed(seed, 0xB6), {kFeatDim + action_count}),
      shuffle_state_(derive_seed(seed, seed_stream::kMinibatchShuffle) ^ 0xBAULL) {
  if (action_count < 1) throw ConfigError("icm: action_count must be >= 1");
  add_conv_stack(feat_);
  feat_.add_dense(kFeatDim, nn::Init::Xavier);
  inverse_.add_dense(256, nn::Init::He).add_relu().add_dense(action_count, nn::Init::Xavier);
  forward_.add_dense(256, nn::Init::He).add_relu().add_dense(kFeatDim + aux_dim_,
                                                             nn::Init::Xavier);
}

nn::Tensor IcmModule::stacked_features(const ModuleBatch& batch, const std::vector<int>& rows) {
  if (batch.next_frames == nullptr) throw ConfigError("icm: batch lacks next_frames");
  const int m = static_cast<int>(rows.size());
  const std::size_t row = static_cast<std::size_t>(batch.frames->numel()) /
                          static_cast<std::size_t>(batch.frames->dim(0));
  nn::Tensor stacked({2 * m, batch.frames->dim(1), batch.frames->dim(2), batch.frames->dim(3)});
  for (int i = 0; i < m; ++i) {
    std::memcpy(stacked.data() + static_cast<std::size_t>(i) * row,
                batch.frames->data() + static_cast<std::size_t>(rows[i]) * row,
                row * sizeof(double));
    std::memcpy(stacked.data() + static_cast<std::size_t>(m + i) * row,
                batch.next_frames->data() + static_cast<std::size_t>(rows[i]) * row,
                row * sizeof(double));
  }
  return feat_.forward(stacked);
}

std::vector<double> IcmModule::rewards(const ModuleBatch& batch) {
  batch.validate();
  const int n = batch.size();
  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  const nn::Tensor feats = stacked_features(batch, rows);

  nn::Tensor fwd_in({n, kFeatDim + action_count_});
  for (int i = 0; i < n; ++i) {
    double* dst = fwd_in.data() + static_cast<std::size_t>(i) * (kFeatDim + action_count_);
    std::memcpy(dst, feats.data() + static_cast<std::size_t>(i) * kFeatDim,
                sizeof(double) * kFeatDim);
    append_onehot(dst + kFeatDim, batch.actions[static_cast<std::size_t>(i)], action_count_);
  }
  const nn::Tensor pred = forward_.forward(fwd_in);
  const int d = kFeatDim + aux_dim_;
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      const double target = j < kFeatDim
                                ? feats.at({n + i, j})
                                : batch.textures[static_cast<std::size_t>(i)]
                                      .features[static_cast<std::size_t>(j - kFeatDim)];
      const double diff = pred.at({i, j}) - target;
      s += diff * diff;
    }
    out[static_cast<std::size_t>(i)] = 0.5 * s / d;
  }
  return out;
}

void IcmModule::update(const ModuleBatch& batch) {
  batch.validate();
  nn::AdamConfig adam;
  adam.lr = opt_.lr;
  const int d = kFeatDim + aux_dim_;
  for_each_minibatch(batch.size(), opt_.train_epochs, opt_.minibatch, shuffle_state_,
                     [&](const std::vector<int>& idx) {
    const int m = static_cast<int>(idx.size());
    const nn::Tensor feats = stacked_features(batch, idx);

    nn::Tensor inv_in({m, 2 * kFeatDim});
    nn::Tensor fwd_in({m, kFeatDim + action_count_});
    nn::Tensor target({m, d});
    std::vector<int> acts(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      acts[static_cast<std::size_t>(i)] = batch.actions[static_cast<std::size_t>(idx[i])];
      std::memcpy(inv_in.data() + static_cast<std::size_t>(i) * 2 * kFeatDim,
                  feats.data() + static_cast<std::size_t>(i) * kFeatDim,
                  sizeof(double) * kFeatDim);
      std::memcpy(inv_in.data() + static_cast<std::size_t>(i) * 2 * kFeatDim + kFeatDim,
                  feats.data() + static_cast<std::size_t>(m + i) * kFeatDim,
                  sizeof(double) * kFeatDim);
      double* fdst = fwd_in.data() + static_cast<std::size_t>(i) * (kFeatDim + action_count_);
      std::memcpy(fdst, feats.data() + static_cast<std::size_t>(i) * kFeatDim,
                  sizeof(double) * kFeatDim);
      append_onehot(fdst + kFeatDim, acts[static_cast<std::size_t>(i)], action_count_);
      double* tdst = target.data() + static_cast<std::size_t>(i) * d;
      std::memcpy(tdst, feats.data() + static_cast<std::size_t>(m + i) * kFeatDim,
                  sizeof(double) * kFeatDim);
      for (int j = 0; j < aux_dim_; ++j)
        tdst[kFeatDim + j] = batch.textures[static_cast<std::size_t>(idx[i])]
                                 .features[static_cast<std::size_t>(j)];
    }

    feat_.zero_grads();
    inverse_.zero_grads();
    forward_.zero_grads();

    // Inverse model: cross-entropy on the action; its gradient is the only
    // one that shapes the feature space.
    const nn::Tensor inv_logits = inverse_.forward(inv_in);
    nn::CrossEntropyResult ce = nn::cross_entropy(inv_logits, acts);
    nn::Tensor dlogits = ce.dlogits;
    for (std::int64_t i = 0; i < dlogits.numel(); ++i) dlogits[i] *= 1.0 - kIcmBeta;
    const nn::Tensor dinv_in = inverse_.backward(dlogits);

    // Forward model on detached features.
    const nn::Tensor pred = forward_.forward(fwd_in);
    nn::Tensor dpred({m, d});
    const double scale = kIcmBeta * 2.0 / (static_cast<double>(m) * d);
    for (std::int64_t i = 0; i < dpred.numel(); ++i) dpred[i] = scale * (pred[i] - target[i]);
    forward_.backward(dpred);

    nn::Tensor dfeat({2 * m, kFeatDim});
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < kFeatDim; ++j) {
        dfeat.at({i, j}) = dinv_in.at({i, j});
        dfeat.at({m + i, j}) = dinv_in.at({i, kFeatDim + j});
      }
    feat_.backward(dfeat);

    feat_.adam_step(adam);
    inverse_.adam_step(adam);
    forward_.adam_step(adam);
  });
}

void IcmModule::save(const std::string& prefix) const {
  feat_.save(prefix + ".feat");
  inverse_.save(prefix + ".inv");
  forward_.save(prefix + ".fwd");
}

void IcmModule::load(const std::string& prefix) {
  feat_.load(prefix + ".feat");
  inverse_.load(prefix + ".inv");
  forward_.load(prefix + ".fwd");
}

// ---------------------------------------------------------------------------
// Sound-texture regression

SndregModule::SndregModule(std::uint64_t seed, int action_count, const ModuleOptions& opt)
    : opt_(opt),
      action_count_(action_count),
      enc_(derive_seed(seed, 0xB7), {1, env::kFrameSize, env::kFrameSize}),
      head_(derive_seed(seed, 0xB8), {kConvOut + action_count}),
      shuffle_state_(derive_seed(seed, seed_stream::kMinibatchShuffle) ^ 0xBBULL) {
  if (action_count < 1) throw ConfigError("sndreg: action_count must be >= 1");
  add_conv_stack(enc_);
  head_.add_dense(128, nn::Init::He).add_relu().add_dense(audio::kTextureDim, nn::Init::Xavier);
}

nn::Tensor SndregModule::predict(const ModuleBatch& batch) {
  const nn::Tensor feats = enc_.forward(*batch.frames);
  const int n = feats.dim(0);
  nn::Tensor head_in({n, kConvOut + action_count_});
  for (int i = 0; i < n; ++i) {
    double* dst = head_in.data() + static_cast<std::size_t>(i) * (kConvOut + action_count_);
    std::memcpy(dst, feats.data() + static_cast<std::size_t>(i) * kConvOut,
                sizeof(double) * kConvOut);
    append_onehot(dst + kConvOut, batch.actions[static_cast<std::size_t>(i)], action_count_);
  }
  return head_.forward(head_in);
}

std::vector<double> SndregModule::rewards(const ModuleBatch& batch) {
  batch.validate();
  const nn::Tensor pred = predict(batch);
  const int n = batch.size();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < audio::kTextureDim; ++j) {
      const double diff = pred.at({i, j}) -
                          batch.textures[static_cast<std::size_t>(i)].features[
                              static_cast<std::size_t>(j)];
      s += diff * diff;
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

void SndregModule::update(const ModuleBatch& batch) {
  batch.validate();
  nn::AdamConfig adam;
  adam.lr = opt_.lr;
  for_each_minibatch(batch.size(), opt_.train_epochs, opt_.minibatch, shuffle_state_,
                     [&](const std::vector<int>& idx) {
    OwnedBatch ob = gather(batch, idx);
    const ModuleBatch mb = ob.view();
    const int m = mb.size();
    const nn::Tensor pred = predict(mb);
    enc_.zero_grads();
    head_.zero_grads();
    nn::Tensor dpred({m, audio::kTextureDim});
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < audio::kTextureDim; ++j)
        dpred.at({i, j}) = 2.0 / m *
                           (pred.at({i, j}) -
                            mb.textures[static_cast<std::size_t>(i)].features[
                                static_cast<std::size_t>(j)]);
    const nn::Tensor dhead_in = head_.backward(dpred);
    nn::Tensor dfeat({m, kConvOut});
    for (int i = 0; i < m; ++i)
      std::memcpy(dfeat.data() + static_cast<std::size_t>(i) * kConvOut,
                  dhead_in.data() + static_cast<std::size_t>(i) * (kConvOut + action_count_),
                  sizeof(double) * kConvOut);
    enc_.backward(dfeat);
    enc_.adam_step(adam);
    head_.adam_step(adam);
  });
}

std::vector<nn::Tensor*> SndregModule::params() {
  std::vector<nn::Tensor*> out;
  for (nn::Network* net : {&enc_, &head_})
    for (nn::Tensor* t : net->params()) out.push_back(t);
  return out;
}

void SndregModule::save(const std::string& prefix) const {
  enc_.save(prefix + ".enc");
  head_.save(prefix + ".head");
}

void SndregModule::load(const std::string& prefix) {
  enc_.load(prefix + ".enc");
  head_.load(prefix + ".head");
}

// ---------------------------------------------------------------------------
// Clustering-only

ClusterModule::ClusterModule(const ModuleOptions& opt) : clusters_(opt.clustering) {}

std::vector<double> ClusterModule::rewards(const ModuleBatch& batch) {
  batch.validate();
  std::vector<double> out(static_cast<std::size_t>(batch.size()), 0.0);
  for (int i = 0; i < batch.size(); ++i) {
    if (batch.silent[static_cast<std::size_t>(i)]) continue;
    out[static_cast<std::size_t>(i)] =
        clusters_.novelty_bonus(batch.textures[static_cast<std::size_t>(i)].features);
  }
  return out;
}

void ClusterModule::update(const ModuleBatch& batch) {
  batch.validate();
  for (int i = 0; i < batch.size(); ++i) {
    ++step_;
    clusters_.online_update(batch.textures[static_cast<std::size_t>(i)].features, step_,
                            batch.silent[static_cast<std::size_t>(i)] != 0);
  }
}

void ClusterModule::save(const std::string& prefix) const {
  nlohmann::json j;
  j["step"] = step_;
  j["clusters"] = nlohmann::json::parse(clusters_.serialize());
  std::ofstream out(prefix + ".state.json");
  if (!out || !(out << j.dump(2)))
    throw IoError("cluster: cannot write " + prefix + ".state.json");
}

void ClusterModule::load(const std::string& prefix) {
  std::ifstream in(prefix + ".state.json");
  if (!in) throw IoError("cluster: cannot read " + prefix + ".state.json");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const nlohmann::json j = nlohmann::json::parse(ss.str());
    step_ = j.at("step").get<std::int64_t>();
    clusters_ = cluster::OnlineClusterSet::deserialize(j.at("clusters").dump());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cluster: bad state file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

std::unique_ptr<RewardModule> make_reward_module(const std::string& method, std::uint64_t seed,
                                                 int action_count, const ModuleOptions& opt) {
  if (method == "aep") return std::make_unique<AepModule>(seed, action_count, opt);
  if (method == "rnd") return std::make_unique<RndModule>(seed, opt);
  if (method == "icm") return std::make_unique<IcmModule>(seed, action_count, opt);
  if (method == "sndreg") return std::make_unique<SndregModule>(seed, action_count, opt);
  if (method == "cluster") return std::make_unique<ClusterModule>(opt);
  if (method == "none") return std::make_unique<NoneModule>();
  throw ConfigError("unknown intrinsic method: " + method);
}

}  // namespace aep::intrinsic
