#include "env/line.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace aep::env {

namespace {
constexpr int kCellPx = kFrameSize / LineWorld::kCells;  // 4
constexpr int kStripTop = 38;
constexpr int kStripRows = 8;
}  // namespace

Observation LineWorld::reset(std::uint64_t) {
  cell_ = 0;
  step_count_ = 0;
  done_ = false;
  Observation obs;
  obs.frame = render();
  obs.audio = audio::make_silence(audio_samples_per_step());
  return obs;
}

std::vector<double> LineWorld::render() const {
  std::vector<double> frame(static_cast<std::size_t>(kFrameSize) * kFrameSize, 0.1);
  auto draw_cell = [&frame](int cell, double gray) {
    for (int r = kStripTop; r < kStripTop + kStripRows; ++r)
      for (int c = cell * kCellPx; c < (cell + 1) * kCellPx; ++c)
        frame[static_cast<std::size_t>(r) * kFrameSize + c] = gray;
  };
  draw_cell(kGoal, 0.5);
  draw_cell(cell_, 0.9);
  return frame;
}

StepResult LineWorld::step(int action) {
  if (done_) throw StateError("line: step after done; reset first");
  if (action < 0 || action >= action_count()) throw ConfigError("line: bad action");

  StepResult res;
  res.obs.audio = audio::make_silence(audio_samples_per_step());
  const int delta = action == 0 ? -1 : action == 1 ? 1 : 0;
  for (int t = 0; t < kFrameSkip && !done_; ++t) {
    cell_ = std::clamp(cell_ + delta, 0, kCells - 1);
    if (cell_ == kGoal) {
      res.reward += 1.0;
      done_ = true;
    }
  }

  ++step_count_;
  if (step_count_ >= episode_cap()) done_ = true;
  res.done = done_;
  res.obs.frame = render();
  return res;
}

}  // namespace aep::env
