#pragma once

#include <vector>

#include "env/env.hpp"

namespace aep::env {

// 12x12 arcade grid. Four coins, two hazards. Coins pay +1 (dense), picking
// up the last coin adds a +10 fanfare and ends the episode; hazards buzz,
// cost -1 (dense) and end the episode; bumping a wall thuds. The sparse
// variant pays only the fanfare. Every event plays its jingle.
class CoinWorld final : public Env {
 public:
  explicit CoinWorld(bool sparse);

  const char* name() const override { return sparse_ ? "coin_sparse" : "coin_dense"; }
  int action_count() const override { return 9; }
  int audio_samples_per_step() const override { return 960; }  // 60 ms
  int episode_cap() const override { return 500; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  struct Cell {
    int x = 0, y = 0;
    bool operator==(const Cell&) const = default;
  };
  static constexpr int kGrid = 12;

  const Cell& agent() const { return agent_; }
  const std::vector<Cell>& coins() const { return coins_; }
  const std::vector<Cell>& hazards() const { return hazards_; }

 private:
  std::vector<double> render() const;

  bool sparse_;
  Cell agent_;
  std::vector<Cell> coins_;
  std::vector<Cell> hazards_;
  std::int64_t events_ = 0;
  int step_count_ = 0;
  bool done_ = true;
  std::uint64_t rng_state_ = 0;
};

}  // namespace aep::env
