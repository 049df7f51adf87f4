#pragma once

#include <memory>

#include "intrinsic/aep_predictor.hpp"
#include "intrinsic/module.hpp"

namespace aep::intrinsic {

// The auditory-event-prediction reward in two stages. Stage 1 pays the
// online-clustering novelty bonus while collecting a corpus of sound
// textures; once clustering saturates (or the step budget runs out) the
// corpus is frozen into K-means event classes and stage 2 pays the
// cross-entropy of an event-class predictor, trained online from each
// rollout after the rewards for it were computed.
class AepModule : public RewardModule {
 public:
  AepModule(std::uint64_t seed, int action_count, const ModuleOptions& opt);

  const char* method() const override { return "aep"; }
  std::vector<double> rewards(const ModuleBatch& batch) override;
  void update(const ModuleBatch& batch) override;
  int phase() const override { return phase_; }
  const cluster::EventClasses* event_classes() const override {
    return phase_ == 2 ? &classes_ : nullptr;
  }
  const cluster::OnlineClusterSet* cluster_set() const override { return &clusters_; }
  double last_accuracy() const override { return last_accuracy_; }
  void save(const std::string& prefix) const override;
  void load(const std::string& prefix) override;

  const std::vector<audio::SoundTexture>& corpus() const { return corpus_; }
  std::int64_t steps_seen() const { return step_; }
  const AepPredictor* predictor() const { return predictor_.get(); }

  // Per-sample event labels under the frozen classes (stage 2 only).
  std::vector<int> labels(const ModuleBatch& batch) const;

 private:
  void freeze();  // throws StateError when the corpus cannot support classes

  std::uint64_t seed_;
  ModuleOptions opt_;
  int action_count_;
  int phase_ = 1;
  std::int64_t step_ = 0;
  cluster::OnlineClusterSet clusters_;
  std::vector<audio::SoundTexture> corpus_;
  cluster::EventClasses classes_;
  std::unique_ptr<AepPredictor> predictor_;
  std::uint64_t shuffle_state_;
  double last_accuracy_ = -1.0;
};

}  // namespace aep::intrinsic
