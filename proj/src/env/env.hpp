#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "audio/waveform.hpp"

namespace aep::env {

inline constexpr int kFrameSize = 84;
inline constexpr int kFrameSkip = 4;  // internal ticks per agent step

// 84x84 grayscale frame in [0,1] plus the audio heard during the step.
struct Observation {
  std::vector<double> frame;  // kFrameSize * kFrameSize, row-major
  audio::Waveform audio;
};

struct StepInfo {
  std::int64_t collision_count = 0;  // cumulative sound events this episode
  std::string event_kind;            // last event in the step window, "" if none
  double impulse = 0.0;              // strongest impact in the window
  // Present only on auto-reset slots: the true final observation of the
  // episode that just ended.
  std::optional<Observation> final_obs;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual const char* name() const = 0;
  virtual int action_count() const = 0;
  virtual int audio_samples_per_step() const = 0;
  virtual int episode_cap() const = 0;
  virtual Observation reset(std::uint64_t seed) = 0;
  // Applies the action for kFrameSkip ticks; audio mixes every sound event
  // at its tick offset. Throws StateError when called on a finished episode.
  virtual StepResult step(int action) = 0;
};

// names: billiard, coin_dense, coin_sparse, line
std::unique_ptr<Env> make_env(const std::string& name);

}  // namespace aep::env
