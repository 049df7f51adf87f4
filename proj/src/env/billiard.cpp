#include "env/billiard.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace aep::env {

namespace {
constexpr double kDt = 0.0125;  // seconds per tick; 4 ticks = the 50 ms clip
constexpr double kPi = 3.14159265358979323846;
constexpr int kSamplesPerTick = 200;

constexpr double kBgGray = 0.15;
constexpr double kAgentGray = 0.95;

double material_gray(audio::Material m) {
  switch (m) {
    case audio::Material::Wood:
      return 0.40;
    case audio::Material::Metal:
      return 0.62;
    case audio::Material::Glass:
      return 0.78;
  }
  return kBgGray;
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(aep::splitmix64(state) >> 11) * 0x1.0p-53;
}

struct Body {
  double* x;
  double* y;
  double* vx;
  double* vy;
  double r;
  audio::Material material;
};

}  // namespace

std::vector<double> render_billiard(const BilliardState& state) {
  std::vector<double> frame(static_cast<std::size_t>(kFrameSize) * kFrameSize, kBgGray);
  auto draw_disk = [&frame](double cx, double cy, double r, double gray) {
    if (r <= 0.0) return;
    for (int row = 0; row < kFrameSize; ++row) {
      const double y = 1.0 - (row + 0.5) / kFrameSize;
      for (int col = 0; col < kFrameSize; ++col) {
        const double x = (col + 0.5) / kFrameSize;
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
          frame[static_cast<std::size_t>(row) * kFrameSize + col] = gray;
      }
    }
  };
  for (const auto& b : state.balls) draw_disk(b.x, b.y, b.radius, material_gray(b.material));
  draw_disk(state.agent_x, state.agent_y, state.agent_radius, kAgentGray);
  return frame;
}

BilliardWorld::BilliardWorld() : BilliardWorld(BilliardOptions{}) {}

BilliardWorld::BilliardWorld(BilliardOptions opt) : opt_(opt) {
  if (opt_.restitution <= 0.0 || opt_.restitution > 1.0)
    throw ConfigError("billiard: restitution must be in (0, 1]");
  if (opt_.drag_per_tick < 0.0 || opt_.drag_per_tick >= 1.0)
    throw ConfigError("billiard: drag must be in [0, 1)");
}

Observation BilliardWorld::reset(std::uint64_t seed) {
  rng_state_ = seed ^ 0x9e3779b97f4a7c15ULL;
  state_ = BilliardState{};
  state_.balls.clear();
  const audio::Material mats[6] = {audio::Material::Wood,  audio::Material::Wood,
                                   audio::Material::Metal, audio::Material::Metal,
                                   audio::Material::Glass, audio::Material::Glass};
  for (int i = 0; i < 6; ++i) {
    BilliardBall b;
    b.material = mats[i];
    for (int attempt = 0; attempt < 1000; ++attempt) {
      b.x = 0.1 + 0.8 * uniform01(rng_state_);
      b.y = 0.1 + 0.8 * uniform01(rng_state_);
      bool ok = std::hypot(b.x - state_.agent_x, b.y - state_.agent_y) >
                state_.agent_radius + b.radius + 0.05;
      for (const auto& other : state_.balls)
        if (std::hypot(b.x - other.x, b.y - other.y) < b.radius + other.radius + 0.02)
          ok = false;
      if (ok) break;
      if (attempt == 999) throw StateError("billiard: could not place balls");
    }
    const double speed = 0.15 + 0.25 * uniform01(rng_state_);
    const double ang = 2.0 * kPi * uniform01(rng_state_);
    b.vx = speed * std::cos(ang);
    b.vy = speed * std::sin(ang);
    state_.balls.push_back(b);
  }
  collisions_ = 0;
  step_count_ = 0;
  done_ = false;

  Observation obs;
  obs.frame = render_billiard(state_);
  obs.audio = audio::make_silence(audio_samples_per_step());
  return obs;
}

double BilliardWorld::kinetic_energy() const {
  double ke = 0.5 * (state_.agent_vx * state_.agent_vx + state_.agent_vy * state_.agent_vy);
  for (const auto& b : state_.balls) ke += 0.5 * (b.vx * b.vx + b.vy * b.vy);
  return ke;
}

void BilliardWorld::tick(int action, int tick_index, audio::Waveform& clip, StepInfo& info) {
  const double e = opt_.restitution;
  const double keep = 1.0 - opt_.drag_per_tick;

  std::vector<Body> bodies;
  bodies.push_back({&state_.agent_x, &state_.agent_y, &state_.agent_vx, &state_.agent_vy,
                    state_.agent_radius, audio::Material::Wood});
  for (auto& b : state_.balls)
    bodies.push_back({&b.x, &b.y, &b.vx, &b.vy, b.radius, b.material});

  for (auto& b : bodies) {
    *b.vx *= keep;
    *b.vy *= keep;
  }
  if (action < 8) {
    const double ang = action * kPi / 4.0;
    state_.agent_vx += opt_.thrust_dv * std::cos(ang);
    state_.agent_vy += opt_.thrust_dv * std::sin(ang);
    const double speed = std::hypot(state_.agent_vx, state_.agent_vy);
    if (speed > opt_.max_agent_speed) {
      state_.agent_vx *= opt_.max_agent_speed / speed;
      state_.agent_vy *= opt_.max_agent_speed / speed;
    }
  }
  for (auto& b : bodies) {
    *b.x += *b.vx * kDt;
    *b.y += *b.vy * kDt;
  }

  auto emit = [&](audio::Material m, double impulse) {
    if (impulse < opt_.min_event_impulse) return;
    ++collisions_;
    info.impulse = std::max(info.impulse, impulse);
    info.event_kind = "impact";
    const int offset = tick_index * kSamplesPerTick;
    const int len = static_cast<int>(clip.samples.size()) - offset;
    audio::mix_into(clip, audio::synth_impact(audio::material_profile(m), impulse, len),
                    offset);
  };

  // Walls reflect the normal component; the moving body rings.
  for (auto& b : bodies) {
    if (*b.x < b.r && *b.vx < 0.0) {
      emit(b.material, -*b.vx);
      *b.x = b.r;
      *b.vx = -e * *b.vx;
    } else if (*b.x > 1.0 - b.r && *b.vx > 0.0) {
      emit(b.material, *b.vx);
      *b.x = 1.0 - b.r;
      *b.vx = -e * *b.vx;
    }
    if (*b.y < b.r && *b.vy < 0.0) {
      emit(b.material, -*b.vy);
      *b.y = b.r;
      *b.vy = -e * *b.vy;
    } else if (*b.y > 1.0 - b.r && *b.vy > 0.0) {
      emit(b.material, *b.vy);
      *b.y = 1.0 - b.r;
      *b.vy = -e * *b.vy;
    }
  }

  // Equal-mass circle pairs: exchange normal velocity with restitution.
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      Body& a = bodies[i];
      Body& b = bodies[j];
      const double dx = *b.x - *a.x;
      const double dy = *b.y - *a.y;
      const double dist = std::hypot(dx, dy);
      const double min_dist = a.r + b.r;
      if (dist >= min_dist || dist == 0.0) continue;
      const double nx = dx / dist;
      const double ny = dy / dist;
      const double closing = (*a.vx - *b.vx) * nx + (*a.vy - *b.vy) * ny;
      // Separate regardless, but only exchange momentum when approaching.
      const double push = 0.5 * (min_dist - dist) + 1e-6;
      *a.x -= push * nx;
      *a.y -= push * ny;
      *b.x += push * nx;
      *b.y += push * ny;
      if (closing <= 0.0) continue;
      const double dv = 0.5 * (1.0 + e) * closing;
      *a.vx -= dv * nx;
      *a.vy -= dv * ny;
      *b.vx += dv * nx;
      *b.vy += dv * ny;
      emit(b.material, closing);
    }
  }
}

StepResult BilliardWorld::step(int action) {
  if (done_) throw StateError("billiard: step after done; reset first");
  if (action < 0 || action >= action_count()) throw ConfigError("billiard: bad action");

  StepResult res;
  res.obs.audio = audio::make_silence(audio_samples_per_step());
  for (int t = 0; t < kFrameSkip; ++t) tick(action, t, res.obs.audio, res.info);

  ++step_count_;
  done_ = step_count_ >= opt_.episode_cap;
  res.done = done_;
  res.reward = 0.0;
  res.info.collision_count = collisions_;
  res.obs.frame = render_billiard(state_);
  return res;
}

}  // namespace aep::env
