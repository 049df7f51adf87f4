#pragma once

#include "intrinsic/module.hpp"
#include "nn/network.hpp"

namespace aep::intrinsic {

// Random-network distillation: a fixed randomly initialized target embedding
// and a trained predictor of it; the squared prediction error on the next
// observation is the bonus. With opt.audio_features the step's sound texture
// is concatenated to the conv features of both networks.
class RndModule : public RewardModule {
 public:
  RndModule(std::uint64_t seed, const ModuleOptions& opt);

  const char* method() const override { return "rnd"; }
  std::vector<double> rewards(const ModuleBatch& batch) override;
  void update(const ModuleBatch& batch) override;
  void save(const std::string& prefix) const override;
  void load(const std::string& prefix) override;

  // Copies the target weights into the predictor: the distillation fixed
  // point, at which every reward is exactly zero.
  void sync_predictor_to_target();

 private:
  nn::Tensor embed(nn::Network& enc, nn::Network& head, const ModuleBatch& batch,
                   nn::Tensor* head_in_out);

  ModuleOptions opt_;
  int aux_dim_;
  nn::Network target_enc_, target_head_;
  nn::Network pred_enc_, pred_head_;
  std::uint64_t shuffle_state_;
};

// Curiosity by forward-model error in a learned feature space; the features
// are shaped only by an inverse model that predicts the action between two
// observations, so uncontrollable pixels wash out. With opt.audio_features
// the forward model must also predict the step's sound texture.
class IcmModule : public RewardModule {
 public:
  IcmModule(std::uint64_t seed, int action_count, const ModuleOptions& opt);

  const char* method() const override { return "icm"; }
  std::vector<double> rewards(const ModuleBatch& batch) override;
  void update(const ModuleBatch& batch) override;
  void save(const std::string& prefix) const override;
  void load(const std::string& prefix) override;

 private:
  // Features of frames and next_frames stacked into one [2n, 128] pass.
  nn::Tensor stacked_features(const ModuleBatch& batch, const std::vector<int>& rows);

  ModuleOptions opt_;
  int action_count_;
  int aux_dim_;
  nn::Network feat_;     // conv stack -> dense 128
  nn::Network inverse_;  // {256} -> 256 relu -> action logits
  nn::Network forward_;  // {128 + actions} -> 256 relu -> {128 + aux}
  std::uint64_t shuffle_state_;
};

// Ablation: regress the sound texture itself from (frame, action); the
// squared L2 error is the bonus.
class SndregModule : public RewardModule {
 public:
  SndregModule(std::uint64_t seed, int action_count, const ModuleOptions& opt);

  const char* method() const override { return "sndreg"; }
  std::vector<double> rewards(const ModuleBatch& batch) override;
  void update(const ModuleBatch& batch) override;
  void save(const std::string& prefix) const override;
  void load(const std::string& prefix) override;

  std::vector<nn::Tensor*> params();

 private:
  nn::Tensor predict(const ModuleBatch& batch);

  ModuleOptions opt_;
  int action_count_;
  nn::Network enc_;   // conv stack -> flatten
  nn::Network head_;  // {2592 + actions} -> 128 relu -> texture dims
  std::uint64_t shuffle_state_;
};

// Ablation: the stage-1 clustering novelty bonus as the only reward, with
// the cluster set updating online for the whole run. No predictor exists.
class ClusterModule : public RewardModule {
 public:
  explicit ClusterModule(const ModuleOptions& opt);

  const char* method() const override { return "cluster"; }
  std::vector<double> rewards(const ModuleBatch& batch) override;
  void update(const ModuleBatch& batch) override;
  const cluster::OnlineClusterSet* cluster_set() const override { return &clusters_; }
  void save(const std::string& prefix) const override;
  void load(const std::string& prefix) override;

 private:
  cluster::OnlineClusterSet clusters_;
  std::int64_t step_ = 0;
};

// Plain PPO: intrinsic rewards identically zero.
class NoneModule : public RewardModule {
 public:
  const char* method() const override { return "none"; }
  std::vector<double> rewards(const ModuleBatch& batch) override {
    batch.validate();
    return std::vector<double>(static_cast<std::size_t>(batch.size()), 0.0);
  }
  void update(const ModuleBatch& batch) override { batch.validate(); }
  void save(const std::string&) const override {}
  void load(const std::string&) override {}
};

}  // namespace aep::intrinsic
