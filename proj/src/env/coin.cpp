#include "env/coin.hpp"

#include <algorithm>

#include "audio/events.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"

namespace aep::env {

namespace {
constexpr int kCellPx = kFrameSize / CoinWorld::kGrid;  // 7
constexpr int kSamplesPerTick = 240;
constexpr int kDirX[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDirY[8] = {0, 1, 1, 1, 0, -1, -1, -1};
}  // namespace

CoinWorld::CoinWorld(bool sparse) : sparse_(sparse) {}

Observation CoinWorld::reset(std::uint64_t seed) {
  rng_state_ = seed ^ 0xc2b2ae3d27d4eb4fULL;
  auto draw_cell = [this] {
    Cell c;
    c.x = static_cast<int>(aep::splitmix64(rng_state_) % kGrid);
    c.y = static_cast<int>(aep::splitmix64(rng_state_) % kGrid);
    return c;
  };
  auto taken = [this](const Cell& c) {
    if (c == agent_) return true;
    for (const auto& o : coins_)
      if (o == c) return true;
    for (const auto& o : hazards_)
      if (o == c) return true;
    return false;
  };

  agent_ = draw_cell();
  coins_.clear();
  hazards_.clear();
  while (static_cast<int>(coins_.size()) < 4) {
    Cell c = draw_cell();
    if (!taken(c)) coins_.push_back(c);
  }
  while (static_cast<int>(hazards_.size()) < 2) {
    Cell c = draw_cell();
    if (!taken(c)) hazards_.push_back(c);
  }
  events_ = 0;
  step_count_ = 0;
  done_ = false;

  Observation obs;
  obs.frame = render();
  obs.audio = audio::make_silence(audio_samples_per_step());
  return obs;
}

std::vector<double> CoinWorld::render() const {
  std::vector<double> frame(static_cast<std::size_t>(kFrameSize) * kFrameSize, 0.1);
  auto draw_cell = [&frame](const Cell& c, double gray) {
    const int col0 = c.x * kCellPx;
    const int row0 = (kGrid - 1 - c.y) * kCellPx;
    for (int r = 1; r < kCellPx - 1; ++r)
      for (int col = 1; col < kCellPx - 1; ++col)
        frame[static_cast<std::size_t>(row0 + r) * kFrameSize + col0 + col] = gray;
  };
  for (const auto& c : hazards_) draw_cell(c, 0.35);
  for (const auto& c : coins_) draw_cell(c, 0.6);
  draw_cell(agent_, 0.95);
  return frame;
}

StepResult CoinWorld::step(int action) {
  if (done_) throw StateError("coin: step after done; reset first");
  if (action < 0 || action >= action_count()) throw ConfigError("coin: bad action");

  StepResult res;
  res.obs.audio = audio::make_silence(audio_samples_per_step());

  auto emit = [&](audio::EventKind kind, int tick) {
    ++events_;
    res.info.event_kind = audio::event_kind_name(kind);
    audio::mix_into(res.obs.audio,
                    audio::synth_event_jingle(kind, aep::splitmix64(rng_state_),
                                              audio_samples_per_step() - tick * kSamplesPerTick),
                    tick * kSamplesPerTick);
  };

  for (int t = 0; t < kFrameSkip && !done_; ++t) {
    if (action < 8) {
      const int nx = agent_.x + kDirX[action];
      const int ny = agent_.y + kDirY[action];
      if (nx < 0 || nx >= kGrid || ny < 0 || ny >= kGrid) {
        emit(audio::EventKind::Footstep, t);  // wall bump
      } else {
        agent_ = {nx, ny};
        auto coin = std::find(coins_.begin(), coins_.end(), agent_);
        if (coin != coins_.end()) {
          coins_.erase(coin);
          emit(audio::EventKind::Coin, t);
          if (!sparse_) res.reward += 1.0;
          if (coins_.empty()) {
            emit(audio::EventKind::Fanfare, t);
            res.reward += 10.0;
            done_ = true;
          }
        }
        auto hazard = std::find(hazards_.begin(), hazards_.end(), agent_);
        if (hazard != hazards_.end()) {
          emit(audio::EventKind::Hazard, t);
          if (!sparse_) res.reward -= 1.0;
          done_ = true;
        }
      }
    }
  }

  ++step_count_;
  if (step_count_ >= episode_cap()) done_ = true;
  res.done = done_;
  res.info.collision_count = events_;
  res.obs.frame = render();
  return res;
}

}  // namespace aep::env
