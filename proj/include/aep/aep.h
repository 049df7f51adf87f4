/* C interface to the auditory-event-prediction RL toolkit.
 *
 * Every function that can fail returns an aep_status; AEP_OK means success.
 * On failure, aep_last_error() returns a thread-local human-readable message
 * describing what went wrong. Pointers returned by the library stay valid
 * until the next failing call on the same thread (for error strings) or until
 * the owning handle is destroyed.
 */
#ifndef AEP_H
#define AEP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AEP_API __declspec(dllexport)
#else
#define AEP_API __attribute__((visibility("default")))
#endif

typedef enum aep_status {
  AEP_OK = 0,
  AEP_ERR_CONFIG = 1,  /* bad wiring: unknown keys, invalid options, shape mismatch */
  AEP_ERR_STATE = 2,   /* call sequence violation (e.g. step after done) */
  AEP_ERR_INPUT = 3,   /* malformed data passed to a valid object */
  AEP_ERR_IO = 4,      /* filesystem failures */
  AEP_ERR_UNKNOWN = 5
} aep_status;

AEP_API const char* aep_version(void);
AEP_API const char* aep_source_hash(void);

/* Message of the most recent failure on this thread; "" if none. */
AEP_API const char* aep_last_error(void);

/* ------------------------------------------------------------------ */
/* Experiments                                                         */
/* ------------------------------------------------------------------ */

typedef struct aep_run_summary {
  int64_t steps;
  int64_t iterations;
  int64_t first_reward_step;  /* -1 when no extrinsic reward was seen */
  int64_t phase2_start_step;  /* -1 unless the aep module froze its classes */
  int32_t stopped_early;
  int32_t frozen_k;
  double final_return;
  double mean_center_distance;
} aep_run_summary;

/* Runs one experiment to completion.
 *   config_text     flat "key = value" experiment description; NULL or empty
 *                   selects the built-in defaults
 *   method_override optional method name replacing the config's (may be NULL)
 *   seed            master seed; all randomness derives from it
 *   out_dir         run directory (created if missing): config.resolved,
 *                   log.csv, timing.csv, summary.json, checkpoints
 *   dump_audio_dir  optional directory for raw non-silent clips (may be NULL)
 *   summary         optional out-parameter (may be NULL)
 */
AEP_API aep_status aep_run_experiment(const char* config_text, const char* method_override,
                                      uint64_t seed, const char* out_dir,
                                      const char* dump_audio_dir, aep_run_summary* summary);

/* Aggregates finished runs into mean +/- std curves: one SVG and one CSV per
 * logged metric, grouped by method. */
AEP_API aep_status aep_emit_plots(const char* const* run_dirs, size_t n_dirs,
                                  const char* out_dir);

/* ------------------------------------------------------------------ */
/* Environments                                                        */
/* ------------------------------------------------------------------ */

typedef struct aep_env aep_env; /* opaque */

/* name: billiard | coin_dense | coin_sparse | line */
AEP_API aep_status aep_env_create(const char* name, aep_env** out);
AEP_API void aep_env_destroy(aep_env* env);

AEP_API aep_status aep_env_action_count(const aep_env* env, int32_t* out);
AEP_API aep_status aep_env_audio_samples_per_step(const aep_env* env, int32_t* out);
AEP_API int32_t aep_frame_size(void); /* frames are aep_frame_size()^2 doubles */

AEP_API aep_status aep_env_reset(aep_env* env, uint64_t seed);
AEP_API aep_status aep_env_step(aep_env* env, int32_t action);

/* Latest observation / step outcome. frame wants capacity >= 84*84; audio
 * writes the step's clip and reports its length. */
AEP_API aep_status aep_env_frame(const aep_env* env, double* out, size_t capacity);
AEP_API aep_status aep_env_audio(const aep_env* env, double* out, size_t capacity,
                                 size_t* written);
AEP_API aep_status aep_env_last_reward(const aep_env* env, double* out);
AEP_API aep_status aep_env_done(const aep_env* env, int32_t* out);
AEP_API aep_status aep_env_collision_count(const aep_env* env, int64_t* out);

/* ------------------------------------------------------------------ */
/* Audio features                                                      */
/* ------------------------------------------------------------------ */

AEP_API int32_t aep_texture_dim(void);

/* Sound-texture features of a mono clip (>= 256 samples in [-1, 1]);
 * out must hold aep_texture_dim() doubles. */
AEP_API aep_status aep_sound_texture(const double* samples, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* AEP_H */
