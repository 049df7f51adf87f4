#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <vector>

#include "common/error.hpp"
#include "doctest.h"
#include "intrinsic/aep_module.hpp"
#include "intrinsic/aep_predictor.hpp"
#include "intrinsic/baselines.hpp"
#include "intrinsic/module.hpp"
#include "intrinsic/normalizer.hpp"
#include "nn/losses.hpp"

using namespace aep;
using intrinsic::ModuleBatch;
using intrinsic::ModuleOptions;
using nn::Tensor;

namespace {

Tensor random_frames(int n, std::mt19937_64& rng) {
  Tensor t({n, 1, 84, 84});
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = dist(rng);
  return t;
}

// Two well-separated texture families plus per-sample jitter.
audio::SoundTexture make_texture(int kind, double jitter) {
  std::vector<double> f(static_cast<std::size_t>(audio::kTextureDim), 0.0);
  for (int j = 0; j < audio::kTextureDim; ++j)
    f[static_cast<std::size_t>(j)] = (kind == 0 ? 1.0 : (j < 16 ? 6.0 : -2.0)) + jitter * (j % 3);
  return audio::SoundTexture{f};
}

ModuleBatch make_view(const Tensor& frames, const Tensor* next, std::vector<int> actions,
                      std::vector<audio::SoundTexture> textures,
                      std::vector<std::uint8_t> silent) {
  ModuleBatch b;
  b.frames = &frames;
  b.next_frames = next;
  b.actions = std::move(actions);
  b.textures = std::move(textures);
  b.silent = std::move(silent);
  return b;
}

// Small clustering setup so stage transitions happen within a few batches.
ModuleOptions tiny_options() {
  ModuleOptions opt;
  opt.clustering.warmup_target = 10;
  opt.clustering.no_growth_window = 40;
  opt.clustering.step_budget = 400;
  opt.min_corpus = 16;
  opt.k_min = 2;
  opt.minibatch = 16;
  return opt;
}

}  // namespace

TEST_CASE("reward normalizer warm-up, zero stream and reset") {
  intrinsic::RewardNormalizer norm(2);
  CHECK(norm.normalize(0, 5.0) == doctest::Approx(5.0));  // first sample passes through
  CHECK(norm.count() == 1);

  intrinsic::RewardNormalizer zeros(1);
  for (int i = 0; i < 100; ++i) CHECK(zeros.normalize(0, 0.0) == 0.0);

  norm.reset();
  CHECK(norm.count() == 0);
  CHECK(norm.normalize(1, -3.0) == doctest::Approx(-3.0));

  CHECK_THROWS_AS(norm.normalize(5, 1.0), InputError);
  CHECK_THROWS_AS(norm.normalize(0, std::nan("")), InputError);
  CHECK_THROWS_AS(intrinsic::RewardNormalizer(0), ConfigError);
  CHECK_THROWS_AS(intrinsic::RewardNormalizer(1, 1.0), ConfigError);
}

TEST_CASE("reward normalizer brings iid streams near unit scale") {
  for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(1.0, 2.5);
    intrinsic::RewardNormalizer norm(4);
    std::vector<double> outs;
    for (int i = 0; i < 5000; ++i) {
      const double y = norm.normalize(i % 4, dist(rng));
      if (i >= 500) outs.push_back(y);
    }
    double mean = 0.0;
    for (double y : outs) mean += y;
    mean /= static_cast<double>(outs.size());
    double var = 0.0;
    for (double y : outs) var += (y - mean) * (y - mean);
    const double sd = std::sqrt(var / static_cast<double>(outs.size()));
    CHECK(sd > 0.5);
    CHECK(sd < 2.0);
  }
}

TEST_CASE("reward normalizer serialization resumes the stream exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  intrinsic::RewardNormalizer a(2);
  std::vector<double> inputs(300);
  for (double& x : inputs) x = dist(rng);
  for (int i = 0; i < 150; ++i) a.normalize(i % 2, inputs[static_cast<std::size_t>(i)]);
  intrinsic::RewardNormalizer b = intrinsic::RewardNormalizer::deserialize(a.serialize());
  for (int i = 150; i < 300; ++i) {
    const double ya = a.normalize(i % 2, inputs[static_cast<std::size_t>(i)]);
    const double yb = b.normalize(i % 2, inputs[static_cast<std::size_t>(i)]);
    CHECK(ya == yb);
  }
  CHECK_THROWS_AS(intrinsic::RewardNormalizer::deserialize("not json"), IoError);
}

TEST_CASE("aep predictor analytic reward values") {
  intrinsic::AepPredictor pred(5, 3, 4);
  std::mt19937_64 rng(17);
  Tensor frames = random_frames(2, rng);
  const std::vector<int> actions = {0, 2};

  // All-zero parameters: uniform distribution over 4 classes.
  for (nn::Tensor* t : pred.params()) t->fill(0.0);
  std::vector<double> r = pred.cross_entropy_rewards(frames, actions, {1, 3});
  CHECK(r[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // Certain and correct: reward exactly zero (competing logits underflow).
  nn::Tensor* out_bias = pred.params().back();
  REQUIRE(out_bias->numel() == 4);
  (*out_bias)[0] = 0.0;
  (*out_bias)[1] = -800.0;
  (*out_bias)[2] = -800.0;
  (*out_bias)[3] = -800.0;
  r = pred.cross_entropy_rewards(frames, actions, {0, 0});
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
}

TEST_CASE("aep predictor rewards match an independent cross-entropy oracle") {
  intrinsic::AepPredictor pred(29, 5, 6);
  std::mt19937_64 rng(23);
  Tensor frames = random_frames(4, rng);
  const std::vector<int> actions = {4, 0, 2, 1};
  const std::vector<int> labels = {5, 1, 0, 3};
  const Tensor z = pred.logits(frames, actions);
  const std::vector<double> r = pred.cross_entropy_rewards(frames, actions, labels);
  for (int i = 0; i < 4; ++i) {
    long double denom = 0.0L;
    for (int j = 0; j < 6; ++j) denom += expl(static_cast<long double>(z.at({i, j})));
    const double oracle =
        static_cast<double>(logl(denom) - static_cast<long double>(z.at({i, labels[i]})));
    CHECK(std::fabs(r[static_cast<std::size_t>(i)] - oracle) < 1e-10);
    CHECK(r[static_cast<std::size_t>(i)] >= 0.0);
  }
}

TEST_CASE("aep predictor training overfits a repeated sample") {
  intrinsic::AepPredictor pred(31, 4, 4);
  std::mt19937_64 rng(31);
  Tensor frame = random_frames(1, rng);
  const std::vector<int> action = {2};
  const std::vector<int> label = {1};
  std::uint64_t shuffle = 77;
  double last = 0.0;
  for (int i = 0; i < 200; ++i)
    last = pred.train(frame, action, label, 1, 1, shuffle, 2.5e-4);
  const double final_loss = pred.cross_entropy_rewards(frame, action, label)[0];
  CHECK(final_loss < 0.01);
  CHECK(final_loss <= last);
}

TEST_CASE("aep predictor training leaves parameters alone at exact certainty") {
  intrinsic::AepPredictor pred(37, 3, 4);
  for (nn::Tensor* t : pred.params()) t->fill(0.0);
  nn::Tensor* out_bias = pred.params().back();
  (*out_bias)[2] = 0.0;
  (*out_bias)[0] = -800.0;
  (*out_bias)[1] = -800.0;
  (*out_bias)[3] = -800.0;

  std::mt19937_64 rng(41);
  Tensor frame = random_frames(1, rng);
  std::uint64_t shuffle = 5;
  pred.train(frame, {0}, {2}, 1, 1, shuffle, 1e-3);

  std::vector<double> flat;
  for (nn::Tensor* t : pred.params())
    flat.insert(flat.end(), t->data(), t->data() + t->numel());
  double nonzero_off_bias = 0.0;
  for (double v : flat) nonzero_off_bias += (v != 0.0 && v != -800.0) ? 1.0 : 0.0;
  CHECK(nonzero_off_bias == 0.0);
}

TEST_CASE("aep predictor loss decreases over epochs on a learnable batch") {
  intrinsic::AepPredictor pred(43, 4, 4);
  std::mt19937_64 rng(47);
  const int n = 128;
  Tensor frames = random_frames(n, rng);
  std::vector<int> actions(n), labels(n);
  for (int i = 0; i < n; ++i) {
    actions[i] = i % 4;
    labels[i] = actions[i];  // event class fully determined by the action
  }
  std::uint64_t shuffle = 3;
  std::vector<double> losses;
  for (int e = 0; e < 10; ++e)
    losses.push_back(pred.train(frames, actions, labels, 1, 32, shuffle, 1e-3));
  CHECK(losses.back() < losses.front());
  CHECK(losses.back() < 0.5 * losses.front());
}

TEST_CASE("aep module stage one pays novelty and collects the corpus") {
  intrinsic::AepModule mod(6, 4, tiny_options());
  CHECK(mod.phase() == 1);
  CHECK(mod.event_classes() == nullptr);
  CHECK(mod.last_accuracy() == -1.0);

  std::mt19937_64 rng(53);
  const int n = 16;
  Tensor frames = random_frames(n, rng);
  std::vector<int> actions(n, 0);
  std::vector<audio::SoundTexture> tex;
  std::vector<std::uint8_t> silent;
  for (int i = 0; i < n; ++i) {
    tex.push_back(make_texture(i % 2, 0.01 * (i % 5)));
    silent.push_back(i % 8 == 7 ? 1 : 0);
  }
  ModuleBatch b = make_view(frames, nullptr, actions, tex, silent);

  const std::vector<double> r = mod.rewards(b);
  for (int i = 0; i < n; ++i) {
    CHECK(r[static_cast<std::size_t>(i)] >= 0.0);
    if (silent[static_cast<std::size_t>(i)]) CHECK(r[static_cast<std::size_t>(i)] == 0.0);
  }
  mod.update(b);
  CHECK(mod.steps_seen() == n);
  CHECK(static_cast<int>(mod.corpus().size()) == n - 2);  // two silent samples skipped
}

TEST_CASE("aep module freezes classes at saturation and switches to prediction") {
  intrinsic::AepModule mod(8, 4, tiny_options());
  std::mt19937_64 rng(59);
  const int n = 16;
  Tensor frames = random_frames(n, rng);
  std::vector<int> actions(n);
  for (int i = 0; i < n; ++i) actions[i] = i % 4;

  int iterations = 0;
  while (mod.phase() == 1 && iterations < 40) {
    std::vector<audio::SoundTexture> tex;
    std::vector<std::uint8_t> silent(n, 0);
    for (int i = 0; i < n; ++i) tex.push_back(make_texture(i % 2, 0.01 * ((i + iterations) % 5)));
    ModuleBatch b = make_view(frames, nullptr, actions, tex, silent);
    mod.rewards(b);
    mod.update(b);
    ++iterations;
  }
  REQUIRE(mod.phase() == 2);
  REQUIRE(mod.event_classes() != nullptr);
  const cluster::EventClasses& ec = *mod.event_classes();
  CHECK(ec.k_events() >= 2);
  CHECK(ec.silence_class() == ec.k_events());
  CHECK(mod.predictor() != nullptr);
  CHECK(mod.predictor()->num_classes() == ec.num_classes());

  // Stage-2 rewards are cross-entropies with labels from the frozen classes,
  // and silent steps map to the silence class.
  std::vector<audio::SoundTexture> tex;
  std::vector<std::uint8_t> silent(n, 0);
  for (int i = 0; i < n; ++i) tex.push_back(make_texture(i % 2, 0.0));
  silent[3] = 1;
  ModuleBatch b = make_view(frames, nullptr, actions, tex, silent);
  const std::vector<int> labels = mod.labels(b);
  CHECK(labels[3] == ec.silence_class());
  const std::vector<double> r = mod.rewards(b);
  CHECK(mod.last_accuracy() >= 0.0);
  CHECK(mod.last_accuracy() <= 1.0);
  for (double v : r) CHECK(v >= 0.0);

  // Rewards are a pure read: identical when evaluated twice, changed by update.
  const std::vector<double> r2 = mod.rewards(b);
  CHECK(r == r2);
  mod.update(b);
  const std::vector<double> r3 = mod.rewards(b);
  CHECK(r != r3);
}

TEST_CASE("aep module aborts when the run stays silent") {
  ModuleOptions opt = tiny_options();
  opt.clustering.step_budget = 40;
  intrinsic::AepModule mod(9, 3, opt);
  std::mt19937_64 rng(61);
  const int n = 20;
  Tensor frames = random_frames(n, rng);
  std::vector<audio::SoundTexture> tex(
      static_cast<std::size_t>(n),
      audio::SoundTexture{std::vector<double>(static_cast<std::size_t>(audio::kTextureDim), 0.0)});
  ModuleBatch b = make_view(frames, nullptr, std::vector<int>(n, 0), tex,
                            std::vector<std::uint8_t>(n, 1));
  mod.update(b);  // 20 silent steps
  CHECK_THROWS_AS(mod.update(b), StateError);  // crosses the 40-step budget with no clusters
}

TEST_CASE("aep rewards spike for novel associations") {
  intrinsic::AepModule mod(12, 4, tiny_options());
  std::mt19937_64 rng(67);
  const int n = 16;
  Tensor frames = random_frames(n, rng);
  std::vector<int> actions(n, 1);

  int iterations = 0;
  while (mod.phase() == 1 && iterations < 40) {
    std::vector<audio::SoundTexture> tex;
    for (int i = 0; i < n; ++i) tex.push_back(make_texture(i % 2, 0.01 * (i % 5)));
    ModuleBatch b = make_view(frames, nullptr, actions, tex, std::vector<std::uint8_t>(n, 0));
    mod.update(b);
    ++iterations;
  }
  REQUIRE(mod.phase() == 2);

  // Master the association (state, action) -> event family A.
  std::vector<audio::SoundTexture> tex_a, tex_b;
  for (int i = 0; i < n; ++i) {
    tex_a.push_back(make_texture(0, 0.0));
    tex_b.push_back(make_texture(1, 0.0));
  }
  ModuleBatch ba = make_view(frames, nullptr, actions, tex_a, std::vector<std::uint8_t>(n, 0));
  ModuleBatch bb = make_view(frames, nullptr, actions, tex_b, std::vector<std::uint8_t>(n, 0));
  for (int i = 0; i < 30; ++i) mod.update(ba);

  const std::vector<double> ra = mod.rewards(ba);
  const std::vector<double> rb = mod.rewards(bb);
  const double mean_a = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mean_b = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  CHECK(mean_b > mean_a);
}

TEST_CASE("rnd reward is zero at the distillation fixed point") {
  ModuleOptions opt;
  intrinsic::RndModule mod(15, opt);
  std::mt19937_64 rng(71);
  const int n = 6;
  Tensor frames = random_frames(n, rng);
  Tensor next = random_frames(n, rng);
  std::vector<audio::SoundTexture> tex(static_cast<std::size_t>(n), make_texture(0, 0.0));
  ModuleBatch b = make_view(frames, &next, std::vector<int>(n, 0), tex,
                            std::vector<std::uint8_t>(n, 0));

  std::vector<double> r = mod.rewards(b);
  for (double v : r) CHECK(v > 0.0);  // fresh predictor disagrees with the target

  mod.sync_predictor_to_target();
  r = mod.rewards(b);
  for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("rnd rewards decay on a looped trajectory") {
  ModuleOptions opt;
  opt.train_epochs = 1;
  opt.minibatch = 8;
  opt.lr = 1e-3;
  intrinsic::RndModule mod(16, opt);
  std::mt19937_64 rng(73);
  const int n = 4;
  Tensor frames = random_frames(n, rng);
  Tensor next = random_frames(n, rng);
  std::vector<audio::SoundTexture> tex(static_cast<std::size_t>(n), make_texture(1, 0.0));
  ModuleBatch b = make_view(frames, &next, std::vector<int>(n, 0), tex,
                            std::vector<std::uint8_t>(n, 0));

  const std::vector<double> r0 = mod.rewards(b);
  for (int i = 0; i < 150; ++i) mod.update(b);
  const std::vector<double> r1 = mod.rewards(b);
  const double m0 = std::accumulate(r0.begin(), r0.end(), 0.0) / n;
  const double m1 = std::accumulate(r1.begin(), r1.end(), 0.0) / n;
  CHECK(m1 < 0.5 * m0);
  for (double v : r1) CHECK(v >= 0.0);
}

TEST_CASE("icm rewards decay as the forward model fits a looped trajectory") {
  ModuleOptions opt;
  opt.train_epochs = 1;
  opt.minibatch = 8;
  opt.lr = 1e-3;
  intrinsic::IcmModule mod(18, 5, opt);
  std::mt19937_64 rng(79);
  const int n = 4;
  Tensor frames = random_frames(n, rng);
  Tensor next = random_frames(n, rng);
  std::vector<int> actions = {0, 1, 2, 3};
  std::vector<audio::SoundTexture> tex(static_cast<std::size_t>(n), make_texture(0, 0.0));
  ModuleBatch b = make_view(frames, &next, actions, tex, std::vector<std::uint8_t>(n, 0));

  const std::vector<double> r0 = mod.rewards(b);
  for (double v : r0) CHECK(v >= 0.0);
  for (int i = 0; i < 200; ++i) mod.update(b);
  const std::vector<double> r1 = mod.rewards(b);
  const double m0 = std::accumulate(r0.begin(), r0.end(), 0.0) / n;
  const double m1 = std::accumulate(r1.begin(), r1.end(), 0.0) / n;
  CHECK(m1 < 0.7 * m0);
}

TEST_CASE("sndreg analytic rewards and learning") {
  ModuleOptions opt;
  opt.train_epochs = 1;
  opt.minibatch = 8;
  opt.lr = 1e-3;
  intrinsic::SndregModule mod(21, 4, opt);
  std::mt19937_64 rng(83);
  const int n = 3;
  Tensor frames = random_frames(n, rng);
  std::vector<int> actions = {0, 1, 3};

  // Zero parameters: prediction is the zero vector, reward = ||phi||^2.
  for (nn::Tensor* t : mod.params()) t->fill(0.0);
  std::vector<double> phi5(static_cast<std::size_t>(audio::kTextureDim), 0.0);
  phi5[4] = 5.0;  // norm exactly 5
  std::vector<audio::SoundTexture> tex(static_cast<std::size_t>(n), audio::SoundTexture{phi5});
  ModuleBatch b = make_view(frames, nullptr, actions, tex, std::vector<std::uint8_t>(n, 0));
  std::vector<double> r = mod.rewards(b);
  for (double v : r) CHECK(v == doctest::Approx(25.0).epsilon(1e-12));

  // Output bias equal to the target: perfect prediction, reward zero.
  nn::Tensor* out_bias = mod.params().back();
  REQUIRE(out_bias->numel() == audio::kTextureDim);
  for (int j = 0; j < audio::kTextureDim; ++j) (*out_bias)[j] = phi5[static_cast<std::size_t>(j)];
  r = mod.rewards(b);
  for (double v : r) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));

  // Random targets: squared-error reward shrinks with training.
  intrinsic::SndregModule learner(22, 4, opt);
  std::vector<audio::SoundTexture> tex2;
  for (int i = 0; i < n; ++i) tex2.push_back(make_texture(i % 2, 0.0));
  ModuleBatch b2 = make_view(frames, nullptr, actions, tex2, std::vector<std::uint8_t>(n, 0));
  const std::vector<double> r_before = learner.rewards(b2);
  const double before = std::accumulate(r_before.begin(), r_before.end(), 0.0);
  for (int i = 0; i < 150; ++i) learner.update(b2);
  const std::vector<double> r_after = learner.rewards(b2);
  const double after = std::accumulate(r_after.begin(), r_after.end(), 0.0);
  CHECK(after < 0.5 * before);
}

TEST_CASE("cluster module matches a hand-driven cluster set and never freezes") {
  ModuleOptions opt = tiny_options();
  intrinsic::ClusterModule mod(opt);
  cluster::OnlineClusterSet mirror(opt.clustering);

  CHECK(mod.phase() == 0);
  CHECK(mod.event_classes() == nullptr);

  std::mt19937_64 rng(89);
  const int n = 12;
  Tensor frames = random_frames(n, rng);
  std::int64_t step = 0;
  for (int it = 0; it < 6; ++it) {
    std::vector<audio::SoundTexture> tex;
    std::vector<std::uint8_t> silent;
    for (int i = 0; i < n; ++i) {
      tex.push_back(make_texture(i % 2, 0.02 * ((i + it) % 4)));
      silent.push_back(i % 6 == 5 ? 1 : 0);
    }
    ModuleBatch b = make_view(frames, nullptr, std::vector<int>(n, 0), tex, silent);
    const std::vector<double> r = mod.rewards(b);
    for (int i = 0; i < n; ++i) {
      const double expect =
          silent[static_cast<std::size_t>(i)]
              ? 0.0
              : mirror.novelty_bonus(tex[static_cast<std::size_t>(i)].features);
      CHECK(r[static_cast<std::size_t>(i)] == expect);
    }
    mod.update(b);
    for (int i = 0; i < n; ++i)
      mirror.online_update(tex[static_cast<std::size_t>(i)].features, ++step,
                           silent[static_cast<std::size_t>(i)] != 0);
  }
  REQUIRE(mod.cluster_set() != nullptr);
  CHECK(mod.cluster_set()->k() == mirror.k());
  CHECK(mod.cluster_set()->k() >= 2);
}

TEST_CASE("factory builds every method and none stays at zero") {
  ModuleOptions opt;
  for (const char* name : {"aep", "rnd", "icm", "sndreg", "cluster", "none"}) {
    auto mod = intrinsic::make_reward_module(name, 3, 4, opt);
    CHECK(std::string(mod->method()) == name);
  }
  CHECK_THROWS_AS(intrinsic::make_reward_module("disagreement", 3, 4, opt), ConfigError);

  auto none = intrinsic::make_reward_module("none", 3, 4, opt);
  std::mt19937_64 rng(97);
  const int n = 5;
  Tensor frames = random_frames(n, rng);
  std::vector<audio::SoundTexture> tex(static_cast<std::size_t>(n), make_texture(0, 0.0));
  ModuleBatch b = make_view(frames, nullptr, std::vector<int>(n, 2), tex,
                            std::vector<std::uint8_t>(n, 0));
  for (double v : none->rewards(b)) CHECK(v == 0.0);
  none->update(b);  // must be a no-op, not an error
}

TEST_CASE("module state round-trips through save and load") {
  const std::string prefix = "build_test_module_ckpt";
  std::mt19937_64 rng(101);
  const int n = 8;
  Tensor frames = random_frames(n, rng);
  Tensor next = random_frames(n, rng);
  std::vector<int> actions(n);
  for (int i = 0; i < n; ++i) actions[i] = i % 4;
  std::vector<audio::SoundTexture> tex;
  for (int i = 0; i < n; ++i) tex.push_back(make_texture(i % 2, 0.01 * i));
  ModuleBatch b = make_view(frames, &next, actions, tex, std::vector<std::uint8_t>(n, 0));

  SUBCASE("rnd") {
    ModuleOptions opt;
    intrinsic::RndModule a(4, opt);
    a.update(b);
    a.save(prefix);
    intrinsic::RndModule c(999, opt);
    c.load(prefix);
    CHECK(a.rewards(b) == c.rewards(b));
  }

  SUBCASE("cluster") {
    ModuleOptions opt = tiny_options();
    intrinsic::ClusterModule a(opt);
    a.update(b);
    a.save(prefix);
    intrinsic::ClusterModule c(opt);
    c.load(prefix);
    CHECK(a.rewards(b) == c.rewards(b));
    intrinsic::ClusterModule d(opt);
    CHECK_THROWS_AS(d.load("definitely_missing_prefix"), IoError);
  }

  SUBCASE("aep across the stage boundary") {
    ModuleOptions opt = tiny_options();
    intrinsic::AepModule a(13, 4, opt);
    int iterations = 0;
    while (a.phase() == 1 && iterations < 40) {
      std::vector<audio::SoundTexture> t2;
      for (int i = 0; i < n; ++i) t2.push_back(make_texture(i % 2, 0.01 * ((i + iterations) % 5)));
      ModuleBatch b2 = make_view(frames, nullptr, actions, t2, std::vector<std::uint8_t>(n, 0));
      a.update(b2);
      ++iterations;
    }
    REQUIRE(a.phase() == 2);
    a.update(b);
    a.save(prefix);
    intrinsic::AepModule c(13, 4, opt);
    c.load(prefix);
    CHECK(c.phase() == 2);
    CHECK(c.steps_seen() == a.steps_seen());
    CHECK(c.corpus().size() == a.corpus().size());
    CHECK(a.rewards(b) == c.rewards(b));
  }
  std::remove((prefix + ".state.json").c_str());
}
