#pragma once

#include <array>

#include "audio/synth.hpp"
#include "env/env.hpp"

namespace aep::env {

// Top-down billiard table on the unit square. The agent is a thrust-driven
// disk; six passive balls (two each of wood, metal, glass) carry seeded
// initial velocities and clatter until drag stops them. Every collision
// (agent-wall, agent-ball, ball-ball, ball-wall) above a small impulse
// threshold rings the struck object's material and counts as one event.
// There is no extrinsic reward.
struct BilliardBall {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double radius = 0.04;
  audio::Material material = audio::Material::Wood;
};

struct BilliardState {
  double agent_x = 0.5, agent_y = 0.5;
  double agent_vx = 0.0, agent_vy = 0.0;
  double agent_radius = 0.05;  // 0 renders nothing (empty-table case)
  std::vector<BilliardBall> balls;
};

// Deterministic top-down rasterization: background 0.15, wood 0.40,
// metal 0.62, glass 0.78, agent 0.95.
std::vector<double> render_billiard(const BilliardState& state);

struct BilliardOptions {
  double restitution = 0.9;
  double drag_per_tick = 0.02;
  double thrust_dv = 0.07;         // agent speed gain per tick while thrusting
  double max_agent_speed = 1.2;    // units/s
  double min_event_impulse = 0.06; // quieter contacts are not events
  int episode_cap = 1000;
};

class BilliardWorld final : public Env {
 public:
  BilliardWorld();
  explicit BilliardWorld(BilliardOptions opt);

  const char* name() const override { return "billiard"; }
  int action_count() const override { return 9; }  // 8 compass directions + stop
  int audio_samples_per_step() const override { return 800; }  // 50 ms
  int episode_cap() const override { return opt_.episode_cap; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  const BilliardState& state() const { return state_; }
  std::int64_t collision_count() const { return collisions_; }
  double kinetic_energy() const;

 private:
  void tick(int action, int tick_index, audio::Waveform& clip, StepInfo& info);

  BilliardOptions opt_;
  BilliardState state_;
  std::int64_t collisions_ = 0;
  int step_count_ = 0;
  bool done_ = true;
  std::uint64_t rng_state_ = 0;
};

}  // namespace aep::env
