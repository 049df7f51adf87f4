#include "harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "common/config.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/version.hpp"
#include "audio/texture.hpp"
#include "audio/wav.hpp"
#include "env/vec_env.hpp"
#include "intrinsic/normalizer.hpp"
#include "rl/gae.hpp"
#include "rl/policy.hpp"

namespace aep::harness {

namespace fs = std::filesystem;

namespace {

constexpr int kMaxAudioDumps = 200;

std::string fmt(double v) { return CsvWriter::format(v); }

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

int uniform_action(std::uint64_t& state, int action_count) {
  const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
  const int a = static_cast<int>(u * action_count);
  return a >= action_count ? action_count - 1 : a;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double mean_pairwise_center_distance(const std::vector<std::vector<double>>& centers) {
  const int k = static_cast<int>(centers.size());
  if (k < 2) return 0.0;
  double sum = 0.0;
  int pairs = 0;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      sum += std::sqrt(cluster::squared_distance(centers[static_cast<std::size_t>(a)],
                                                 centers[static_cast<std::size_t>(b)]));
      ++pairs;
    }
  return sum / pairs;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write: " + path);
  out << body;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return from_text(body.str());
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  KeyValueConfig kv = KeyValueConfig::parse_text(text);
  ExperimentConfig c;
  c.env = kv.get_string("env", c.env);
  c.method = kv.get_string("method", c.method);
  c.total_steps = kv.get_int("total_steps", c.total_steps);
  c.num_envs = static_cast<int>(kv.get_int("num_envs", c.num_envs));
  c.rollout_steps = static_cast<int>(kv.get_int("rollout_steps", c.rollout_steps));
  c.ext_coef = kv.get_double("ext_coef", c.ext_coef);
  c.int_coef = kv.get_double("int_coef", c.int_coef);
  c.lr = kv.get_double("lr", c.lr);
  c.clip = kv.get_double("clip", c.clip);
  c.entropy_coef = kv.get_double("entropy_coef", c.entropy_coef);
  c.gamma = kv.get_double("gamma", c.gamma);
  c.lambda = kv.get_double("lambda", c.lambda);
  c.value_coef = kv.get_double("value_coef", c.value_coef);
  c.kl_stop = kv.get_double("kl_stop", c.kl_stop);
  c.epochs = static_cast<int>(kv.get_int("epochs", c.epochs));
  c.minibatches = static_cast<int>(kv.get_int("minibatches", c.minibatches));
  c.phase1_budget = kv.get_int("phase1_budget", c.phase1_budget);
  c.warmup_clips = static_cast<int>(kv.get_int("warmup_clips", c.warmup_clips));
  c.no_growth_window = static_cast<int>(kv.get_int("no_growth_window", c.no_growth_window));
  c.k_min = static_cast<int>(kv.get_int("k_min", c.k_min));
  c.k_max = static_cast<int>(kv.get_int("k_max", c.k_max));
  c.min_corpus = static_cast<int>(kv.get_int("min_corpus", c.min_corpus));
  c.module_epochs = static_cast<int>(kv.get_int("module_epochs", c.module_epochs));
  c.module_minibatch = static_cast<int>(kv.get_int("module_minibatch", c.module_minibatch));
  c.module_lr = kv.get_double("module_lr", c.module_lr);
  c.audio_features = kv.get_bool("audio_features", c.audio_features);
  c.random_collection = kv.get_bool("random_collection", c.random_collection);
  c.random_policy = kv.get_bool("random_policy", c.random_policy);
  c.stop_at_return = kv.get_double("stop_at_return", c.stop_at_return);
  c.stop_window = static_cast<int>(kv.get_int("stop_window", c.stop_window));
  kv.get_int("seed", 0);  // present in resolved captures; the runner owns the seed

  const auto unknown = kv.unconsumed();
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> envs = {"billiard", "coin_dense", "coin_sparse", "line"};
  static const std::vector<std::string> methods = {"aep", "rnd", "icm", "sndreg", "cluster",
                                                   "none"};
  auto in = [](const std::vector<std::string>& xs, const std::string& x) {
    for (const auto& v : xs)
      if (v == x) return true;
    return false;
  };
  if (!in(envs, env)) throw ConfigError("unknown env: " + env);
  if (!in(methods, method)) throw ConfigError("unknown method: " + method);
  if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (num_envs < 1) throw ConfigError("num_envs must be >= 1");
  if (rollout_steps < 1) throw ConfigError("rollout_steps must be >= 1");
  if (ext_coef < 0 || int_coef < 0) throw ConfigError("reward coefficients must be >= 0");
  if (phase1_budget < 1) throw ConfigError("phase1_budget must be >= 1");
  if (warmup_clips < 2) throw ConfigError("warmup_clips must be >= 2");
  if (no_growth_window < 1) throw ConfigError("no_growth_window must be >= 1");
  if (k_min < 2 || k_max < k_min) throw ConfigError("need 2 <= k_min <= k_max");
  if (min_corpus < k_min) throw ConfigError("min_corpus must be >= k_min");
  if (module_epochs < 1 || module_minibatch < 1 || module_lr <= 0)
    throw ConfigError("module training parameters out of range");
  if (random_collection && method != "aep")
    throw ConfigError("random_collection applies to method aep only");
  if (random_policy && method != "none")
    throw ConfigError("random_policy applies to method none only");
  if (stop_window < 1) throw ConfigError("stop_window must be >= 1");
  ppo_config().validate();
}

rl::PPOConfig ExperimentConfig::ppo_config() const {
  rl::PPOConfig p;
  p.lr = lr;
  p.clip = clip;
  p.entropy_coef = entropy_coef;
  p.gamma = gamma;
  p.lambda = lambda;
  p.value_coef = value_coef;
  p.kl_stop = kl_stop;
  p.epochs = epochs;
  p.minibatches = minibatches;
  p.c_ext = ext_coef;
  p.c_int = int_coef;
  return p;
}

intrinsic::ModuleOptions ExperimentConfig::module_options() const {
  intrinsic::ModuleOptions m;
  m.clustering.warmup_target = warmup_clips;
  m.clustering.no_growth_window = no_growth_window;
  m.clustering.step_budget = phase1_budget;
  m.k_min = k_min;
  m.k_max = k_max;
  m.min_corpus = min_corpus;
  m.train_epochs = module_epochs;
  m.minibatch = module_minibatch;
  m.lr = module_lr;
  m.audio_features = audio_features;
  return m;
}

std::int64_t ExperimentConfig::iterations() const {
  const std::int64_t per = static_cast<std::int64_t>(num_envs) * rollout_steps;
  return (total_steps + per - 1) / per;
}

std::string ExperimentConfig::resolved_text(std::uint64_t seed) const {
  std::ostringstream out;
  out << "# resolved experiment configuration\n";
  out << "# version = " << version() << "\n";
  out << "# source_hash = " << source_hash() << "\n";
  out << "env = " << env << "\n";
  out << "method = " << method << "\n";
  out << "seed = " << seed << "\n";
  out << "total_steps = " << total_steps << "\n";
  out << "num_envs = " << num_envs << "\n";
  out << "rollout_steps = " << rollout_steps << "\n";
  out << "ext_coef = " << fmt(ext_coef) << "\n";
  out << "int_coef = " << fmt(int_coef) << "\n";
  out << "lr = " << fmt(lr) << "\n";
  out << "clip = " << fmt(clip) << "\n";
  out << "entropy_coef = " << fmt(entropy_coef) << "\n";
  out << "gamma = " << fmt(gamma) << "\n";
  out << "lambda = " << fmt(lambda) << "\n";
  out << "value_coef = " << fmt(value_coef) << "\n";
  out << "kl_stop = " << fmt(kl_stop) << "\n";
  out << "epochs = " << epochs << "\n";
  out << "minibatches = " << minibatches << "\n";
  out << "phase1_budget = " << phase1_budget << "\n";
  out << "warmup_clips = " << warmup_clips << "\n";
  out << "no_growth_window = " << no_growth_window << "\n";
  out << "k_min = " << k_min << "\n";
  out << "k_max = " << k_max << "\n";
  out << "min_corpus = " << min_corpus << "\n";
  out << "module_epochs = " << module_epochs << "\n";
  out << "module_minibatch = " << module_minibatch << "\n";
  out << "module_lr = " << fmt(module_lr) << "\n";
  out << "audio_features = " << fmt_bool(audio_features) << "\n";
  out << "random_collection = " << fmt_bool(random_collection) << "\n";
  out << "random_policy = " << fmt_bool(random_policy) << "\n";
  out << "stop_at_return = " << fmt(stop_at_return) << "\n";
  out << "stop_window = " << stop_window << "\n";
  return out.str();
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         const std::string& out_dir, const std::string& dump_audio_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  if (!dump_audio_dir.empty()) fs::create_directories(dump_audio_dir);
  write_text_file(out_dir + "/config.resolved", cfg.resolved_text(seed));

  const int n_envs = cfg.num_envs;
  const int t_steps = cfg.rollout_steps;
  const int batch_rows = n_envs * t_steps;
  const bool needs_next = cfg.method == "rnd" || cfg.method == "icm";

  std::vector<std::unique_ptr<env::Env>> envs;
  std::vector<std::uint64_t> env_seeds;
  for (int i = 0; i < n_envs; ++i) {
    envs.push_back(env::make_env(cfg.env));
    env_seeds.push_back(derive_seed(seed, seed_stream::kEnvBase + static_cast<std::uint64_t>(i)));
  }
  const int action_count = envs[0]->action_count();
  env::VecEnv vec(std::move(envs), env_seeds);

  rl::PolicyNet policy(derive_seed(seed, seed_stream::kPolicyInit), action_count);
  auto module = intrinsic::make_reward_module(cfg.method,
                                              derive_seed(seed, seed_stream::kModuleInit),
                                              action_count, cfg.module_options());
  intrinsic::RewardNormalizer normalizer(n_envs);
  std::uint64_t action_state = derive_seed(seed, seed_stream::kActionSample);
  std::uint64_t shuffle_state = derive_seed(seed, seed_stream::kMinibatchShuffle);
  const rl::PPOConfig ppo_cfg = cfg.ppo_config();
  const std::vector<double> zero_texture(static_cast<std::size_t>(audio::kTextureDim), 0.0);

  CsvWriter log(out_dir + "/log.csv",
                {"steps", "mean_return", "mean_intrinsic", "events_per_1k", "clusters",
                 "accuracy", "phase"});
  CsvWriter timing(out_dir + "/timing.csv", {"steps", "wall_ms"});

  // Persistent per-env state across iterations.
  std::vector<env::Observation> obs = vec.reset_all();
  std::vector<double> ep_return(static_cast<std::size_t>(n_envs), 0.0);
  std::vector<std::int64_t> prev_events(static_cast<std::size_t>(n_envs), 0);
  std::deque<double> recent_returns;
  std::vector<std::pair<std::int64_t, double>> completed;  // (global step, episode return)

  RunResult result;
  std::vector<double> log_events_per_1k, log_mean_intrinsic;
  double last_mean_return = 0.0;
  int audio_dumps = 0;
  const std::int64_t max_iterations = cfg.iterations();

  // Rollout storage, reused across iterations.
  nn::Tensor frames({batch_rows, 1, env::kFrameSize, env::kFrameSize});
  nn::Tensor next_frames = needs_next ? nn::Tensor({batch_rows, 1, env::kFrameSize,
                                                    env::kFrameSize})
                                      : nn::Tensor();
  constexpr std::size_t kFramePixels =
      static_cast<std::size_t>(env::kFrameSize) * env::kFrameSize;

  try {
    for (std::int64_t iter = 0; iter < max_iterations; ++iter) {
      const auto iter_start = std::chrono::steady_clock::now();
      const std::int64_t steps_before = iter * batch_rows;
      const int phase_at_start = module->phase();
      const bool use_policy =
          !cfg.random_policy && !(cfg.random_collection && phase_at_start == 1);

      rl::RolloutBatch rollout;
      rollout.steps = t_steps;
      rollout.envs = n_envs;
      rollout.actions.assign(static_cast<std::size_t>(batch_rows), 0);
      rollout.log_probs.assign(static_cast<std::size_t>(batch_rows), 0.0);
      rollout.adv_ext.assign(static_cast<std::size_t>(batch_rows), 0.0);
      rollout.adv_int.assign(static_cast<std::size_t>(batch_rows), 0.0);
      rollout.ret_ext.assign(static_cast<std::size_t>(batch_rows), 0.0);
      rollout.ret_int.assign(static_cast<std::size_t>(batch_rows), 0.0);

      std::vector<double> v_ext(static_cast<std::size_t>(batch_rows), 0.0);
      std::vector<double> v_int(static_cast<std::size_t>(batch_rows), 0.0);
      std::vector<double> r_ext(static_cast<std::size_t>(batch_rows), 0.0);
      std::vector<std::uint8_t> dones(static_cast<std::size_t>(batch_rows), 0);
      intrinsic::ModuleBatch mbatch;
      mbatch.actions.assign(static_cast<std::size_t>(batch_rows), 0);
      mbatch.textures.assign(static_cast<std::size_t>(batch_rows),
                             audio::SoundTexture{zero_texture});
      mbatch.silent.assign(static_cast<std::size_t>(batch_rows), 0);

      nn::Tensor step_frames({n_envs, 1, env::kFrameSize, env::kFrameSize});
      std::vector<int> actions(static_cast<std::size_t>(n_envs), 0);
      std::vector<double> log_probs(static_cast<std::size_t>(n_envs), 0.0);
      std::int64_t events_iter = 0;
      std::vector<double> iter_episode_returns;

      for (int t = 0; t < t_steps; ++t) {
        for (int i = 0; i < n_envs; ++i) {
          const std::size_t row = static_cast<std::size_t>(t) * n_envs + i;
          std::memcpy(frames.data() + row * kFramePixels,
                      obs[static_cast<std::size_t>(i)].frame.data(),
                      sizeof(double) * kFramePixels);
        }
        if (use_policy) {
          std::memcpy(step_frames.data(),
                      frames.data() + static_cast<std::size_t>(t) * n_envs * kFramePixels,
                      sizeof(double) * static_cast<std::size_t>(n_envs) * kFramePixels);
          const rl::PolicyOutput out = policy.forward(step_frames);
          rl::sample_actions(out.logits, action_state, actions, log_probs);
          for (int i = 0; i < n_envs; ++i) {
            const std::size_t row = static_cast<std::size_t>(t) * n_envs + i;
            v_ext[row] = out.v_ext[static_cast<std::size_t>(i)];
            v_int[row] = out.v_int[static_cast<std::size_t>(i)];
            rollout.log_probs[row] = log_probs[static_cast<std::size_t>(i)];
          }
        } else {
          for (int i = 0; i < n_envs; ++i)
            actions[static_cast<std::size_t>(i)] = uniform_action(action_state, action_count);
        }

        const std::vector<env::StepResult> results = vec.step(actions);
        for (int i = 0; i < n_envs; ++i) {
          const std::size_t row = static_cast<std::size_t>(t) * n_envs + i;
          const env::StepResult& res = results[static_cast<std::size_t>(i)];
          rollout.actions[row] = actions[static_cast<std::size_t>(i)];
          mbatch.actions[row] = actions[static_cast<std::size_t>(i)];
          r_ext[row] = res.reward;
          dones[row] = res.done ? 1 : 0;

          const env::Observation& true_next =
              res.done ? *res.info.final_obs : res.obs;
          if (needs_next)
            std::memcpy(next_frames.data() + row * kFramePixels, true_next.frame.data(),
                        sizeof(double) * kFramePixels);
          const audio::Waveform& clip = true_next.audio;
          if (audio::is_silent(clip)) {
            mbatch.silent[row] = 1;
          } else {
            mbatch.textures[row] = audio::extract_texture(clip);
            if (!dump_audio_dir.empty() && audio_dumps < kMaxAudioDumps) {
              char name[64];
              std::snprintf(name, sizeof name, "/clip_%08lld_env%d.wav",
                            static_cast<long long>(steps_before + row + 1), i);
              audio::write_wav(dump_audio_dir + name, clip);
              ++audio_dumps;
            }
          }

          const std::int64_t delta = res.info.collision_count -
                                     prev_events[static_cast<std::size_t>(i)];
          events_iter += delta;
          prev_events[static_cast<std::size_t>(i)] = res.done ? 0 : res.info.collision_count;

          ep_return[static_cast<std::size_t>(i)] += res.reward;
          if (res.reward > 0 && result.first_reward_step < 0)
            result.first_reward_step = steps_before + static_cast<std::int64_t>(row) + 1;
          if (res.done) {
            const double ret = ep_return[static_cast<std::size_t>(i)];
            ep_return[static_cast<std::size_t>(i)] = 0.0;
            iter_episode_returns.push_back(ret);
            completed.emplace_back(steps_before + static_cast<std::int64_t>(row) + 1, ret);
            recent_returns.push_back(ret);
            while (static_cast<int>(recent_returns.size()) > cfg.stop_window)
              recent_returns.pop_front();
          }
          obs[static_cast<std::size_t>(i)] = res.obs;
        }
      }

      // Intrinsic rewards use the module as it stood before this batch.
      mbatch.frames = &frames;
      mbatch.next_frames = needs_next ? &next_frames : nullptr;
      const std::vector<double> raw_intrinsic = module->rewards(mbatch);
      std::vector<double> norm_intrinsic(static_cast<std::size_t>(batch_rows), 0.0);
      for (int t = 0; t < t_steps; ++t)
        for (int i = 0; i < n_envs; ++i) {
          const std::size_t row = static_cast<std::size_t>(t) * n_envs + i;
          norm_intrinsic[row] = normalizer.normalize(i, raw_intrinsic[row]);
        }

      if (use_policy) {
        // Bootstrap values from the post-rollout observations.
        for (int i = 0; i < n_envs; ++i)
          std::memcpy(step_frames.data() + static_cast<std::size_t>(i) * kFramePixels,
                      obs[static_cast<std::size_t>(i)].frame.data(),
                      sizeof(double) * kFramePixels);
        const rl::PolicyOutput boot = policy.forward(step_frames);

        std::vector<double> env_r(static_cast<std::size_t>(t_steps));
        std::vector<double> env_v(static_cast<std::size_t>(t_steps));
        std::vector<std::uint8_t> env_d(static_cast<std::size_t>(t_steps));
        for (int i = 0; i < n_envs; ++i) {
          for (int t = 0; t < t_steps; ++t) {
            const std::size_t row = static_cast<std::size_t>(t) * n_envs + i;
            env_r[static_cast<std::size_t>(t)] = r_ext[row];
            env_v[static_cast<std::size_t>(t)] = v_ext[row];
            env_d[static_cast<std::size_t>(t)] = dones[row];
          }
          const rl::GaeResult ge =
              rl::gae(env_r, env_v, boot.v_ext[static_cast<std::size_t>(i)], env_d, cfg.gamma,
                      cfg.lambda, true);
          for (int t = 0; t < t_steps; ++t) {
            const std::size_t row = static_cast<std::size_t>(t) * n_envs + i;
            env_r[static_cast<std::size_t>(t)] = norm_intrinsic[row];
            env_v[static_cast<std::size_t>(t)] = v_int[row];
            rollout.adv_ext[row] = ge.advantages[static_cast<std::size_t>(t)];
            rollout.ret_ext[row] = ge.returns[static_cast<std::size_t>(t)];
          }
          const rl::GaeResult gi =
              rl::gae(env_r, env_v, boot.v_int[static_cast<std::size_t>(i)], env_d, cfg.gamma,
                      cfg.lambda, false);
          for (int t = 0; t < t_steps; ++t) {
            const std::size_t row = static_cast<std::size_t>(t) * n_envs + i;
            rollout.adv_int[row] = gi.advantages[static_cast<std::size_t>(t)];
            rollout.ret_int[row] = gi.returns[static_cast<std::size_t>(t)];
          }
        }

        rollout.frames = frames;
        rl::ppo_update(policy, rollout, ppo_cfg, shuffle_state);
      }

      module->update(mbatch);
      if (phase_at_start == 1 && module->phase() == 2) {
        result.phase2_start_step = steps_before + batch_rows;
        const cluster::EventClasses* ec = module->event_classes();
        if (ec != nullptr) {
          result.frozen_k = ec->k_events();
          result.mean_center_distance = mean_pairwise_center_distance(ec->centers());
          ec->save(out_dir + "/event_classes.json");
        }
        if (module->cluster_set() != nullptr)
          write_text_file(out_dir + "/cluster_state.json", module->cluster_set()->serialize());
        normalizer.reset();  // the reward scale changes with the new objective
      }

      if (!iter_episode_returns.empty()) last_mean_return = mean_of(iter_episode_returns);
      const double mean_intr = mean_of(raw_intrinsic);
      const double events_per_1k = 1000.0 * static_cast<double>(events_iter) / batch_rows;
      const cluster::EventClasses* ec = module->event_classes();
      const double clusters =
          ec != nullptr ? ec->k_events()
                        : (module->cluster_set() != nullptr ? module->cluster_set()->k() : 0);
      log.row({static_cast<double>(steps_before + batch_rows), last_mean_return, mean_intr,
               events_per_1k, clusters, module->last_accuracy(),
               static_cast<double>(module->phase())});
      log_events_per_1k.push_back(events_per_1k);
      log_mean_intrinsic.push_back(mean_intr);

      const double wall_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - iter_start)
                                 .count();
      timing.row({static_cast<double>(steps_before + batch_rows), wall_ms});

      result.steps = steps_before + batch_rows;
      result.iterations = iter + 1;

      if (!std::isnan(cfg.stop_at_return) &&
          static_cast<int>(recent_returns.size()) >= cfg.stop_window) {
        double m = 0.0;
        for (double r : recent_returns) m += r;
        m /= static_cast<double>(recent_returns.size());
        if (m >= cfg.stop_at_return) {
          result.stopped_early = true;
          break;
        }
      }
    }
  } catch (const Error& e) {
    std::ostringstream report;
    report << "run aborted\n";
    report << "method = " << cfg.method << "\n";
    report << "env = " << cfg.env << "\n";
    report << "seed = " << seed << "\n";
    report << "steps = " << result.steps << "\n";
    if (module->cluster_set() != nullptr)
      report << "clusters_found = " << module->cluster_set()->k() << "\n";
    report << "reason = " << e.what() << "\n";
    write_text_file(out_dir + "/abort.txt", report.str());
    log.flush();
    timing.flush();
    throw;
  }

  // For methods that keep clustering online for the whole run, report the
  // final center diversity.
  if (module->event_classes() == nullptr && module->cluster_set() != nullptr &&
      module->cluster_set()->k() >= 2) {
    result.mean_center_distance =
        mean_pairwise_center_distance(module->cluster_set()->centers());
    write_text_file(out_dir + "/cluster_state.json", module->cluster_set()->serialize());
  }

  // Final evaluation metric: mean return of episodes completed in the last
  // quarter of the run (all completed episodes when the run is short).
  {
    const std::int64_t cut = result.steps - result.steps / 4;
    std::vector<double> tail;
    for (const auto& [step, ret] : completed)
      if (step > cut) tail.push_back(ret);
    if (tail.empty())
      for (const auto& [step, ret] : completed) tail.push_back(ret);
    result.final_return = mean_of(tail);
  }

  const auto tenth = [](const std::vector<double>& rows, bool last) {
    if (rows.empty()) return 0.0;
    const std::size_t k = std::max<std::size_t>(1, rows.size() / 10);
    std::vector<double> part;
    if (last)
      part.assign(rows.end() - static_cast<std::ptrdiff_t>(k), rows.end());
    else
      part.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k));
    return mean_of(part);
  };
  const auto quarter_tail = [](const std::vector<double>& rows) {
    if (rows.empty()) return 0.0;
    const std::size_t k = std::max<std::size_t>(1, rows.size() / 4);
    std::vector<double> part(rows.end() - static_cast<std::ptrdiff_t>(k), rows.end());
    return mean_of(part);
  };

  policy.save(out_dir + "/checkpoint.policy");
  module->save(out_dir + "/checkpoint.module");
  write_text_file(out_dir + "/checkpoint.normalizer.json", normalizer.serialize());

  nlohmann::json summary;
  summary["aborted"] = false;
  summary["env"] = cfg.env;
  summary["episodes_completed"] = completed.size();
  summary["events_per_1k_final_quarter"] = quarter_tail(log_events_per_1k);
  summary["final_return"] = result.final_return;
  summary["first_reward_step"] = result.first_reward_step;
  summary["frozen_k"] = result.frozen_k;
  summary["intrinsic_first_tenth"] = tenth(log_mean_intrinsic, false);
  summary["intrinsic_last_tenth"] = tenth(log_mean_intrinsic, true);
  summary["iterations"] = result.iterations;
  summary["mean_center_distance"] = result.mean_center_distance;
  summary["method"] = cfg.method;
  summary["phase2_start_step"] = result.phase2_start_step;
  summary["seed"] = seed;
  summary["source_hash"] = source_hash();
  summary["steps"] = result.steps;
  summary["stopped_early"] = result.stopped_early;
  summary["version"] = version();
  write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

  return result;
}

}  // namespace aep::harness
