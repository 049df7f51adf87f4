#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "audio/texture.hpp"
#include "cluster/event_classes.hpp"
#include "cluster/online.hpp"
#include "nn/tensor.hpp"

namespace aep::intrinsic {

// One rollout's worth of transitions in SoA form. Frames are [n, 1, 84, 84];
// next_frames holds the true successor observation (the terminal observation
// rather than the reset frame when an episode ended). textures[i] is the
// sound emitted during step i.
struct ModuleBatch {
  const nn::Tensor* frames = nullptr;
  const nn::Tensor* next_frames = nullptr;
  std::vector<int> actions;
  std::vector<audio::SoundTexture> textures;
  std::vector<std::uint8_t> silent;

  int size() const { return static_cast<int>(actions.size()); }
  void validate() const;  // throws ConfigError on inconsistent fields
};

struct ModuleOptions {
  cluster::OnlineClusterSet::Options clustering;
  int k_min = 4;
  int k_max = 32;
  int min_corpus = 50;     // non-silent clips required to freeze event classes
  int train_epochs = 4;
  int minibatch = 64;
  double lr = 2.5e-4;
  bool audio_features = false;  // rnd/icm variant: concatenate sound textures
};

// Intrinsic-reward strategies behind one interface. reward() must be called
// on a batch before update() consumes it: rewards use only the state of the
// module prior to training on those samples. Modules never touch the policy
// or the environments.
class RewardModule {
 public:
  virtual ~RewardModule() = default;

  virtual const char* method() const = 0;

  // Raw (pre-normalization) non-negative intrinsic rewards for the batch.
  virtual std::vector<double> rewards(const ModuleBatch& batch) = 0;

  // One training pass over the batch, sequenced after the policy update.
  virtual void update(const ModuleBatch& batch) = 0;

  // Two-stage methods report 1 before their class freeze and 2 after;
  // single-stage methods report 0.
  virtual int phase() const { return 0; }

  // Frozen event classes, when the method has produced them.
  virtual const cluster::EventClasses* event_classes() const { return nullptr; }

  // Online cluster state, when the method maintains one.
  virtual const cluster::OnlineClusterSet* cluster_set() const { return nullptr; }

  // Fraction of the latest rewards() batch the predictor classified
  // correctly; -1 when the method has no classifier.
  virtual double last_accuracy() const { return -1.0; }

  virtual void save(const std::string& prefix) const = 0;
  virtual void load(const std::string& prefix) = 0;
};

// method is one of {aep, sndreg, cluster, rnd, icm, none}.
std::unique_ptr<RewardModule> make_reward_module(const std::string& method, std::uint64_t seed,
                                                 int action_count, const ModuleOptions& opt);

}  // namespace aep::intrinsic
