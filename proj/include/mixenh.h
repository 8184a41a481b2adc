/* include/mixenh.h */

/* Copyright 2026  mixenh authors */

/* Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

   THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF
   ANY KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY
   IMPLIED WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR
   PURPOSE, MERCHANTABLITY OR NON-INFRINGEMENT.
   See the Apache 2 License for the specific language governing permissions
   and limitations under the License. */

/* C interface to the mixenh speech-enhancement library.
 *
 * Conventions:
 *  - Every fallible call returns a mixenh_status; MIXENH_OK is 0.
 *  - On failure, mixenh_last_error() returns a message for the calling
 *    thread (valid until that thread's next library call).
 *  - char** out parameters receive a heap string owned by the caller;
 *    release it with mixenh_string_free(). They are left untouched on
 *    failure. Optional out parameters may be NULL.
 */

#ifndef MIXENH_INCLUDE_MIXENH_H_
#define MIXENH_INCLUDE_MIXENH_H_

#include <stdint.h>

#if defined(_WIN32)
#define MIXENH_API __declspec(dllexport)
#else
#define MIXENH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mixenh_status {
  MIXENH_OK = 0,
  MIXENH_ERR_INVALID_ARGUMENT = 1,
  MIXENH_ERR_CONFIG = 2,
  MIXENH_ERR_IO = 3,
  MIXENH_ERR_UNSUPPORTED_FORMAT = 4,
  MIXENH_ERR_CORRUPT_FILE = 5,
  MIXENH_ERR_EMPTY_SIGNAL = 6,
  MIXENH_ERR_SILENT_SIGNAL = 7,
  MIXENH_ERR_SHAPE_MISMATCH = 8,
  MIXENH_ERR_EMPTY_MANIFEST = 9,
  MIXENH_ERR_UNSUPPORTED_OUTPUTS = 10,
  MIXENH_ERR_WRONG_KIND = 11,
  MIXENH_ERR_MISSING_FORWARD_CONTEXT = 12,
  MIXENH_ERR_NONFINITE_ACTIVATION = 13,
  MIXENH_ERR_NONFINITE_GRADIENT = 14,
  MIXENH_ERR_DIVERGED_LOSS = 15,
  MIXENH_ERR_INTERNAL = 16
} mixenh_status;

/* Stable identifier for a status value, e.g. "config_error". */
MIXENH_API const char* mixenh_status_name(mixenh_status status);

/* Message from the calling thread's most recent failed call ("" if none). */
MIXENH_API const char* mixenh_last_error(void);

/* Releases strings returned through char** out parameters. NULL is a no-op. */
MIXENH_API void mixenh_string_free(char* s);

/* Scans root_dir recursively for mono 16-bit 16 kHz WAV files and writes a
 * JSON-lines manifest to out_path. kind is "clean", "noise", or "noisy".
 * Unreadable or mismatched files are skipped and counted. */
MIXENH_API mixenh_status mixenh_build_manifest(const char* root_dir,
                                               const char* kind,
                                               const char* out_path,
                                               int64_t* out_count,
                                               int64_t* out_skipped);

/* Generates the seeded synthetic corpus (harmonic "speech", filtered-noise
 * "noise", and distorted premixed "noisy" clips) under out_dir, with
 * per-kind manifests plus a combined all.jsonl. */
MIXENH_API mixenh_status mixenh_simulate(const char* out_dir, int n_clean,
                                         int n_noise, int n_noisy,
                                         uint64_t seed);

/* JSON array of the mixing matrices the separation loss may choose from for
 * a model with num_outputs output channels. */
MIXENH_API mixenh_status mixenh_enum_matrices(int num_outputs,
                                              char** out_json);

/* Parses and validates a run-config file, applying defaults and resolving
 * relative manifest paths; returns the fully resolved document. */
MIXENH_API mixenh_status mixenh_resolve_config(const char* config_path,
                                               char** out_json);

/* Runs the training loop described by the config file, writing checkpoints,
 * metrics.jsonl, and a resolved_config.json echo into out_dir. When
 * seed_override is non-NULL it replaces both the sampler and trainer seeds.
 * The summary JSON reports the best checkpoint path, epoch, and validation
 * SNR improvement. */
MIXENH_API mixenh_status mixenh_train_run(const char* config_path,
                                          const char* out_dir,
                                          const uint64_t* seed_override,
                                          char** out_summary_json);

/* Scores processed files against clean references: for every clean entry in
 * the manifest, reads the same-named file under processed_dir and noisy_dir
 * and writes a CSV report ("path,snr_in_db,snr_out_db,snri_db"). */
MIXENH_API mixenh_status mixenh_eval_snr(const char* clean_manifest,
                                         const char* processed_dir,
                                         const char* noisy_dir,
                                         const char* out_csv);

/* Compares analytic gradients with central finite differences on a small
 * seeded network. probes_per_group <= 0 selects the default (50).
 * inject_error != 0 deliberately corrupts one gradient group (negative
 * control). out_report_json carries the worst coordinate's details. */
MIXENH_API mixenh_status mixenh_gradcheck(uint64_t seed, int probes_per_group,
                                          int inject_error,
                                          double* out_max_rel_err,
                                          char** out_report_json);

/* A loaded model (checkpoint + JSON sidecar); not thread-safe per handle. */
typedef struct mixenh_enhancer mixenh_enhancer;

MIXENH_API mixenh_status mixenh_enhancer_open(const char* checkpoint_path,
                                              mixenh_enhancer** out_enhancer);

MIXENH_API void mixenh_enhancer_close(mixenh_enhancer* enhancer);

/* Denoises in_path (one WAV, or every *.wav in a directory) into same-named
 * files under out_dir. When remix_beta_db is non-NULL each output is blended
 * with its unprocessed input at that SNR. out_files (optional) receives the
 * number of files written. */
MIXENH_API mixenh_status mixenh_enhancer_run(mixenh_enhancer* enhancer,
                                             const char* in_path,
                                             const char* out_dir,
                                             const double* remix_beta_db,
                                             int* out_files);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MIXENH_INCLUDE_MIXENH_H_ */
