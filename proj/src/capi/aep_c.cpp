#include "aep/aep.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "audio/texture.hpp"
#include "common/error.hpp"
#include "common/version.hpp"
#include "env/env.hpp"
#include "harness/plots.hpp"
#include "harness/trainer.hpp"

namespace {

thread_local std::string g_last_error;

aep_status fail(aep_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Runs `fn` and maps the project error taxonomy onto status codes.
template <typename Fn>
aep_status guarded(Fn&& fn) {
  try {
    fn();
    return AEP_OK;
  } catch (const aep::ConfigError& e) {
    return fail(AEP_ERR_CONFIG, e.what());
  } catch (const aep::StateError& e) {
    return fail(AEP_ERR_STATE, e.what());
  } catch (const aep::InputError& e) {
    return fail(AEP_ERR_INPUT, e.what());
  } catch (const aep::IoError& e) {
    return fail(AEP_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(AEP_ERR_UNKNOWN, e.what());
  } catch (...) {
    return fail(AEP_ERR_UNKNOWN, "unknown error");
  }
}

}  // namespace

struct aep_env {
  std::unique_ptr<aep::env::Env> env;
  aep::env::Observation obs;
  double last_reward = 0.0;
  bool done = false;
  bool live = false;  // true once reset
  int64_t collision_count = 0;
};

extern "C" {

const char* aep_version(void) { return aep::version(); }

const char* aep_source_hash(void) { return aep::source_hash(); }

const char* aep_last_error(void) { return g_last_error.c_str(); }

aep_status aep_run_experiment(const char* config_text, const char* method_override,
                              uint64_t seed, const char* out_dir, const char* dump_audio_dir,
                              aep_run_summary* summary) {
  if (out_dir == nullptr) return fail(AEP_ERR_INPUT, "out_dir must not be null");
  return guarded([&] {
    aep::harness::ExperimentConfig cfg =
        (config_text == nullptr || config_text[0] == '\0')
            ? aep::harness::ExperimentConfig()
            : aep::harness::ExperimentConfig::from_text(config_text);
    if (method_override != nullptr && method_override[0] != '\0')
      cfg.method = method_override;
    cfg.validate();
    const aep::harness::RunResult r = aep::harness::run_experiment(
        cfg, seed, out_dir, dump_audio_dir == nullptr ? "" : dump_audio_dir);
    if (summary != nullptr) {
      summary->steps = r.steps;
      summary->iterations = r.iterations;
      summary->first_reward_step = r.first_reward_step;
      summary->phase2_start_step = r.phase2_start_step;
      summary->stopped_early = r.stopped_early ? 1 : 0;
      summary->frozen_k = r.frozen_k;
      summary->final_return = r.final_return;
      summary->mean_center_distance = r.mean_center_distance;
    }
  });
}

aep_status aep_emit_plots(const char* const* run_dirs, size_t n_dirs, const char* out_dir) {
  if (out_dir == nullptr) return fail(AEP_ERR_INPUT, "out_dir must not be null");
  if (run_dirs == nullptr && n_dirs > 0)
    return fail(AEP_ERR_INPUT, "run_dirs must not be null");
  return guarded([&] {
    std::vector<std::string> dirs;
    for (size_t i = 0; i < n_dirs; ++i) {
      if (run_dirs[i] == nullptr) throw aep::InputError("run_dirs contains null");
      dirs.emplace_back(run_dirs[i]);
    }
    aep::harness::emit_plots(dirs, out_dir);
  });
}

aep_status aep_env_create(const char* name, aep_env** out) {
  if (name == nullptr || out == nullptr)
    return fail(AEP_ERR_INPUT, "name and out must not be null");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<aep_env>();
    handle->env = aep::env::make_env(name);
    *out = handle.release();
  });
}

void aep_env_destroy(aep_env* env) { delete env; }

aep_status aep_env_action_count(const aep_env* env, int32_t* out) {
  if (env == nullptr || out == nullptr) return fail(AEP_ERR_INPUT, "null argument");
  *out = env->env->action_count();
  return AEP_OK;
}

aep_status aep_env_audio_samples_per_step(const aep_env* env, int32_t* out) {
  if (env == nullptr || out == nullptr) return fail(AEP_ERR_INPUT, "null argument");
  *out = env->env->audio_samples_per_step();
  return AEP_OK;
}

int32_t aep_frame_size(void) { return aep::env::kFrameSize; }

aep_status aep_env_reset(aep_env* env, uint64_t seed) {
  if (env == nullptr) return fail(AEP_ERR_INPUT, "env must not be null");
  return guarded([&] {
    env->obs = env->env->reset(seed);
    env->last_reward = 0.0;
    env->done = false;
    env->live = true;
    env->collision_count = 0;
  });
}

aep_status aep_env_step(aep_env* env, int32_t action) {
  if (env == nullptr) return fail(AEP_ERR_INPUT, "env must not be null");
  if (!env->live) return fail(AEP_ERR_STATE, "env must be reset before stepping");
  return guarded([&] {
    aep::env::StepResult res = env->env->step(action);
    env->obs = std::move(res.obs);
    env->last_reward = res.reward;
    env->done = res.done;
    env->collision_count = res.info.collision_count;
  });
}

aep_status aep_env_frame(const aep_env* env, double* out, size_t capacity) {
  if (env == nullptr || out == nullptr) return fail(AEP_ERR_INPUT, "null argument");
  if (!env->live) return fail(AEP_ERR_STATE, "env must be reset first");
  const size_t need = env->obs.frame.size();
  if (capacity < need) return fail(AEP_ERR_INPUT, "frame buffer too small");
  std::memcpy(out, env->obs.frame.data(), need * sizeof(double));
  return AEP_OK;
}

aep_status aep_env_audio(const aep_env* env, double* out, size_t capacity, size_t* written) {
  if (env == nullptr || out == nullptr || written == nullptr)
    return fail(AEP_ERR_INPUT, "null argument");
  if (!env->live) return fail(AEP_ERR_STATE, "env must be reset first");
  const size_t need = env->obs.audio.samples.size();
  if (capacity < need) return fail(AEP_ERR_INPUT, "audio buffer too small");
  std::memcpy(out, env->obs.audio.samples.data(), need * sizeof(double));
  *written = need;
  return AEP_OK;
}

aep_status aep_env_last_reward(const aep_env* env, double* out) {
  if (env == nullptr || out == nullptr) return fail(AEP_ERR_INPUT, "null argument");
  *out = env->last_reward;
  return AEP_OK;
}

aep_status aep_env_done(const aep_env* env, int32_t* out) {
  if (env == nullptr || out == nullptr) return fail(AEP_ERR_INPUT, "null argument");
  *out = env->done ? 1 : 0;
  return AEP_OK;
}

aep_status aep_env_collision_count(const aep_env* env, int64_t* out) {
  if (env == nullptr || out == nullptr) return fail(AEP_ERR_INPUT, "null argument");
  *out = env->collision_count;
  return AEP_OK;
}

int32_t aep_texture_dim(void) { return aep::audio::kTextureDim; }

aep_status aep_sound_texture(const double* samples, size_t n, double* out) {
  if (samples == nullptr || out == nullptr) return fail(AEP_ERR_INPUT, "null argument");
  return guarded([&] {
    aep::audio::Waveform w;
    w.samples.assign(samples, samples + n);
    const aep::audio::SoundTexture t = aep::audio::extract_texture(w);
    std::memcpy(out, t.features.data(), t.features.size() * sizeof(double));
  });
}

}  // extern "C"
