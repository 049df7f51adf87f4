#pragma once

#include "env/env.hpp"

namespace aep::env {

// Silent 21-cell corridor: start at cell 0, +1 for reaching cell 20,
// 64-step cap. Exists purely to sanity-check the learner without audio.
class LineWorld final : public Env {
 public:
  const char* name() const override { return "line"; }
  int action_count() const override { return 3; }  // left, right, stay
  int audio_samples_per_step() const override { return 800; }
  int episode_cap() const override { return 64; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  static constexpr int kCells = 21;
  static constexpr int kGoal = 20;
  int cell() const { return cell_; }

 private:
  std::vector<double> render() const;

  int cell_ = 0;
  int step_count_ = 0;
  bool done_ = true;
};

}  // namespace aep::env
