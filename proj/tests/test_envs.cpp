#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "audio/texture.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "env/billiard.hpp"
#include "env/coin.hpp"
#include "env/line.hpp"
#include "env/vec_env.hpp"

using namespace aep::env;

namespace {

// Compass action for a unit direction; matches the envs' action layout.
int dir_to_action(int dx, int dy) {
  static const int dirs[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1},
                                 {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  for (int a = 0; a < 8; ++a)
    if (dirs[a][0] == dx && dirs[a][1] == dy) return a;
  return 8;
}

bool frames_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("resets are deterministic per seed") {
  for (const char* name : {"billiard", "coin_dense", "coin_sparse", "line"}) {
    auto a = make_env(name);
    auto b = make_env(name);
    Observation oa = a->reset(1234);
    Observation ob = b->reset(1234);
    CHECK(frames_equal(oa.frame, ob.frame));
    Observation oc = a->reset(1234);
    CHECK(frames_equal(oa.frame, oc.frame));
  }
  CHECK_THROWS_AS(make_env("pong"), aep::ConfigError);
}

TEST_CASE("billiard reset: zero collisions, silent audio, valid frame") {
  BilliardWorld env;
  Observation obs = env.reset(7);
  CHECK(env.collision_count() == 0);
  CHECK(aep::audio::is_silent(obs.audio));
  CHECK(obs.audio.samples.size() == 800);
  REQUIRE(obs.frame.size() == static_cast<std::size_t>(kFrameSize) * kFrameSize);
  for (double v : obs.frame) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("1000 seeded billiard resets never overlap bodies") {
  BilliardWorld env;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    env.reset(seed);
    const BilliardState& s = env.state();
    REQUIRE(s.balls.size() == 6);
    for (std::size_t i = 0; i < s.balls.size(); ++i) {
      const auto& bi = s.balls[i];
      CHECK(std::hypot(bi.x - s.agent_x, bi.y - s.agent_y) >= s.agent_radius + bi.radius);
      for (std::size_t j = i + 1; j < s.balls.size(); ++j)
        CHECK(std::hypot(bi.x - s.balls[j].x, bi.y - s.balls[j].y) >=
              bi.radius + s.balls[j].radius);
    }
  }
}

TEST_CASE("becalmed billiard table: stop action yields silence and zero reward") {
  BilliardWorld env;
  env.reset(3);
  // Drag puts every ball to sleep well within 100 stopped steps.
  for (int i = 0; i < 100; ++i) env.step(8);
  const auto before = env.collision_count();
  StepResult res = env.step(8);
  CHECK(res.reward == 0.0);
  CHECK(aep::audio::is_silent(res.obs.audio));
  CHECK(res.info.collision_count == before);
  CHECK(res.info.event_kind.empty());
}

TEST_CASE("driving into the wall makes noise and counts") {
  BilliardWorld env;
  env.reset(5);
  bool hit = false;
  std::int64_t last_count = 0;
  for (int i = 0; i < 20 && !hit; ++i) {
    StepResult res = env.step(4);  // due west
    if (res.info.collision_count > last_count && res.info.event_kind == "impact") {
      hit = true;
      CHECK(aep::audio::rms(res.obs.audio) > aep::audio::kSilenceRms);
      CHECK(res.info.impulse > 0.0);
    }
    last_count = res.info.collision_count;
  }
  CHECK(hit);
}

TEST_CASE("audio is non-silent exactly when an event fired") {
  BilliardWorld env;
  env.reset(11);
  std::mt19937_64 rng(4);
  std::int64_t last = 0;
  for (int i = 0; i < 120; ++i) {
    StepResult res = env.step(static_cast<int>(rng() % 9));
    const bool rang = !aep::audio::is_silent(res.obs.audio);
    const bool event = res.info.collision_count > last;
    CHECK(rang == event);
    last = res.info.collision_count;
    if (res.done) break;
  }
}

TEST_CASE("conservative billiard mode conserves kinetic energy") {
  BilliardOptions opt;
  opt.restitution = 1.0;
  opt.drag_per_tick = 0.0;
  BilliardWorld env(opt);
  env.reset(17);
  const double ke0 = env.kinetic_energy();
  REQUIRE(ke0 > 0.0);
  for (int i = 0; i < 999; ++i) env.step(8);
  CHECK(std::abs(env.kinetic_energy() - ke0) / ke0 < 0.01);
}

TEST_CASE("billiard episode cap and step-after-done") {
  BilliardOptions opt;
  opt.episode_cap = 3;
  BilliardWorld env(opt);
  env.reset(1);
  CHECK_FALSE(env.step(8).done);
  CHECK_FALSE(env.step(8).done);
  CHECK(env.step(8).done);
  CHECK_THROWS_AS(env.step(8), aep::StateError);
  CHECK_THROWS_AS((env.reset(1), env.step(9)), aep::ConfigError);
}

TEST_CASE("agent disk renders at the center, empty table renders flat") {
  BilliardState s;
  s.agent_x = 0.5;
  s.agent_y = 0.5;
  s.agent_radius = 0.05;
  auto frame = render_billiard(s);
  int lit = 0;
  for (int row = 0; row < kFrameSize; ++row)
    for (int col = 0; col < kFrameSize; ++col) {
      const double x = (col + 0.5) / kFrameSize;
      const double y = 1.0 - (row + 0.5) / kFrameSize;
      const bool inside = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) <= 0.05 * 0.05;
      const double want = inside ? 0.95 : 0.15;
      CHECK(frame[static_cast<std::size_t>(row) * kFrameSize + col] == want);
      lit += inside;
    }
  CHECK(lit > 0);

  BilliardState empty;
  empty.agent_radius = 0.0;
  auto flat = render_billiard(empty);
  for (double v : flat) CHECK(v == 0.15);
  CHECK(frames_equal(render_billiard(s), frame));
}

TEST_CASE("coin pickup pays out and jingles") {
  CoinWorld env(false);
  // Find a seed whose board has a coin in a clear straight line from the
  // agent (no hazard or other coin in between, within two steps).
  std::uint64_t found_seed = 0;
  int found_action = -1, found_dist = 0;
  for (std::uint64_t seed = 1; seed < 60 && found_action < 0; ++seed) {
    env.reset(seed);
    const auto agent = env.agent();
    for (const auto& coin : env.coins()) {
      const int dx = coin.x - agent.x;
      const int dy = coin.y - agent.y;
      const bool straight = dx == 0 || dy == 0 || std::abs(dx) == std::abs(dy);
      const int dist = std::max(std::abs(dx), std::abs(dy));
      if (!straight || dist == 0 || dist > 8) continue;
      const int sx = (dx > 0) - (dx < 0);
      const int sy = (dy > 0) - (dy < 0);
      bool clear = true;
      for (int i = 1; i < dist; ++i) {
        CoinWorld::Cell cell{agent.x + i * sx, agent.y + i * sy};
        for (const auto& h : env.hazards())
          if (h == cell) clear = false;
        for (const auto& c : env.coins())
          if (c == cell) clear = false;
      }
      if (clear) {
        found_seed = seed;
        found_action = dir_to_action(sx, sy);
        found_dist = dist;
        break;
      }
    }
  }
  REQUIRE(found_action >= 0);

  env.reset(found_seed);
  const int steps = (found_dist + kFrameSkip - 1) / kFrameSkip;
  bool collected = false;
  for (int i = 0; i < steps && !collected; ++i) {
    StepResult res = env.step(found_action);
    if (res.info.event_kind == "coin" || res.info.event_kind == "fanfare") {
      collected = true;
      CHECK(res.reward >= 1.0);
      CHECK_FALSE(aep::audio::is_silent(res.obs.audio));
    }
  }
  CHECK(collected);

  // Sparse variant: identical board, pickup is silent in reward terms only.
  CoinWorld sparse(true);
  sparse.reset(found_seed);
  bool sparse_collected = false;
  for (int i = 0; i < steps && !sparse_collected; ++i) {
    StepResult res = sparse.step(found_action);
    if (res.info.event_kind == "coin") {
      sparse_collected = true;
      CHECK(res.reward == 0.0);
      CHECK_FALSE(aep::audio::is_silent(res.obs.audio));
    } else if (res.info.event_kind == "fanfare") {
      sparse_collected = true;  // the lined-up coin was the last one
      CHECK(res.reward == 10.0);
    }
  }
  CHECK(sparse_collected);
}

TEST_CASE("coin world wall bumps thud") {
  CoinWorld env(false);
  env.reset(2);
  // March due west until pinned to the wall; bumps emit footsteps.
  bool bumped = false;
  for (int i = 0; i < 6 && !bumped; ++i) {
    StepResult res = env.step(4);
    if (res.info.event_kind == "footstep") {
      bumped = true;
      CHECK_FALSE(aep::audio::is_silent(res.obs.audio));
    }
    if (res.done) break;
  }
  CHECK(bumped);
}

TEST_CASE("line world: optimal run, cap, silence") {
  LineWorld env;
  env.reset(0);
  double total = 0.0;
  int steps = 0;
  StepResult res;
  do {
    res = env.step(1);
    total += res.reward;
    ++steps;
    CHECK(aep::audio::is_silent(res.obs.audio));
  } while (!res.done);
  CHECK(total == 1.0);
  CHECK(steps == 5);  // 20 cells at 4 cells per step
  CHECK_THROWS_AS(env.step(1), aep::StateError);

  env.reset(0);
  total = 0.0;
  steps = 0;
  do {
    res = env.step(2);  // stay forever
    total += res.reward;
    ++steps;
  } while (!res.done);
  CHECK(steps == env.episode_cap());
  CHECK(total == 0.0);
}

TEST_CASE("eight identically seeded envs step identically") {
  std::vector<std::unique_ptr<Env>> envs;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < 8; ++i) {
    envs.push_back(make_env("billiard"));
    seeds.push_back(42);
  }
  VecEnv vec(std::move(envs), seeds);
  auto obs = vec.reset_all();
  for (int i = 1; i < 8; ++i) CHECK(frames_equal(obs[0].frame, obs[static_cast<std::size_t>(i)].frame));
  for (int step = 0; step < 5; ++step) {
    auto res = vec.step(std::vector<int>(8, step % 9));
    for (int i = 1; i < 8; ++i) {
      CHECK(frames_equal(res[0].obs.frame, res[static_cast<std::size_t>(i)].obs.frame));
      CHECK(res[0].info.collision_count == res[static_cast<std::size_t>(i)].info.collision_count);
    }
  }
}

TEST_CASE("vec stepping equals a hand-rolled sequential loop") {
  std::vector<std::unique_ptr<Env>> envs;
  envs.push_back(make_env("coin_dense"));
  envs.push_back(make_env("coin_dense"));
  std::vector<std::uint64_t> seeds = {11, 22};
  VecEnv vec(std::move(envs), seeds);
  auto vec_obs = vec.reset_all();

  auto ea = make_env("coin_dense");
  auto eb = make_env("coin_dense");
  Env* manual[2] = {ea.get(), eb.get()};
  std::uint64_t episode[2] = {0, 0};
  Observation ma = ea->reset(aep::derive_seed(11, 0));
  Observation mb = eb->reset(aep::derive_seed(22, 0));
  CHECK(frames_equal(vec_obs[0].frame, ma.frame));
  CHECK(frames_equal(vec_obs[1].frame, mb.frame));

  std::mt19937_64 rng(9);
  for (int step = 0; step < 40; ++step) {
    std::vector<int> actions = {static_cast<int>(rng() % 9), static_cast<int>(rng() % 9)};
    auto res = vec.step(actions);
    for (int i = 0; i < 2; ++i) {
      StepResult want = manual[i]->step(actions[static_cast<std::size_t>(i)]);
      if (want.done) {
        want.info.final_obs = std::move(want.obs);
        want.obs = manual[i]->reset(
            aep::derive_seed(seeds[static_cast<std::size_t>(i)], ++episode[i]));
      }
      const auto& got = res[static_cast<std::size_t>(i)];
      CHECK(got.reward == want.reward);
      CHECK(got.done == want.done);
      CHECK(frames_equal(got.obs.frame, want.obs.frame));
      CHECK(got.obs.audio.samples == want.obs.audio.samples);
      CHECK(got.info.collision_count == want.info.collision_count);
      CHECK(got.info.final_obs.has_value() == want.info.final_obs.has_value());
      if (got.info.final_obs)
        CHECK(frames_equal(got.info.final_obs->frame, want.info.final_obs->frame));
    }
  }
}

TEST_CASE("finished slots auto-reset with the final observation preserved") {
  std::vector<std::unique_ptr<Env>> envs;
  envs.push_back(make_env("line"));
  VecEnv vec(std::move(envs), {5});
  vec.reset_all();
  StepResult last;
  for (int i = 0; i < 5; ++i) last = vec.step({1})[0];
  CHECK(last.done);
  CHECK(last.reward == 1.0);
  REQUIRE(last.info.final_obs.has_value());
  // The slot already shows the fresh episode: agent back at cell 0.
  LineWorld fresh;
  Observation start = fresh.reset(0);
  CHECK(frames_equal(last.obs.frame, start.frame));
  CHECK_FALSE(frames_equal(last.info.final_obs->frame, start.frame));
  // Next step works without an explicit reset.
  CHECK_FALSE(vec.step({2})[0].done);
}

TEST_CASE("vec env wiring errors") {
  std::vector<std::unique_ptr<Env>> envs;
  envs.push_back(make_env("line"));
  CHECK_THROWS_AS(VecEnv(std::move(envs), {1, 2}), aep::ConfigError);
  std::vector<std::unique_ptr<Env>> envs2;
  envs2.push_back(make_env("line"));
  VecEnv vec(std::move(envs2), {1});
  vec.reset_all();
  CHECK_THROWS_AS(vec.step({1, 1}), aep::ConfigError);
}
