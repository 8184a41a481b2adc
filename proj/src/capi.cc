// src/capi.cc

// Copyright 2026  mixenh authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mixenh.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "audio-io.h"
#include "config.h"
#include "enhance.h"
#include "error.h"
#include "gradcheck.h"
#include "mixit-loss.h"
#include "report.h"
#include "synth-corpus.h"
#include "trainer.h"

namespace {

thread_local std::string t_last_error;

mixenh_status status_of(mixenh::ErrorCode code) {
  using mixenh::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return MIXENH_ERR_INVALID_ARGUMENT;
    case ErrorCode::kConfigError:
      return MIXENH_ERR_CONFIG;
    case ErrorCode::kIoFailure:
      return MIXENH_ERR_IO;
    case ErrorCode::kUnsupportedFormat:
      return MIXENH_ERR_UNSUPPORTED_FORMAT;
    case ErrorCode::kCorruptFile:
      return MIXENH_ERR_CORRUPT_FILE;
    case ErrorCode::kEmptySignal:
      return MIXENH_ERR_EMPTY_SIGNAL;
    case ErrorCode::kSilentSignal:
      return MIXENH_ERR_SILENT_SIGNAL;
    case ErrorCode::kShapeMismatch:
      return MIXENH_ERR_SHAPE_MISMATCH;
    case ErrorCode::kEmptyManifest:
      return MIXENH_ERR_EMPTY_MANIFEST;
    case ErrorCode::kUnsupportedOutputs:
      return MIXENH_ERR_UNSUPPORTED_OUTPUTS;
    case ErrorCode::kWrongKind:
      return MIXENH_ERR_WRONG_KIND;
    case ErrorCode::kMissingForwardContext:
      return MIXENH_ERR_MISSING_FORWARD_CONTEXT;
    case ErrorCode::kNonFiniteActivation:
      return MIXENH_ERR_NONFINITE_ACTIVATION;
    case ErrorCode::kNonFiniteGradient:
      return MIXENH_ERR_NONFINITE_GRADIENT;
    case ErrorCode::kDivergedLoss:
      return MIXENH_ERR_DIVERGED_LOSS;
  }
  return MIXENH_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes + the thread's error
// message. Out parameters must only be written after all throwing work.
template <typename Fn>
mixenh_status guarded(Fn&& fn) {
  try {
    t_last_error.clear();
    fn();
    return MIXENH_OK;
  } catch (const mixenh::Error& e) {
    t_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return MIXENH_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return MIXENH_ERR_INTERNAL;
  }
}

mixenh_status require_args(std::initializer_list<const void*> args) {
  for (const void* a : args) {
    if (a == nullptr) {
      t_last_error = "null argument";
      return MIXENH_ERR_INVALID_ARGUMENT;
    }
  }
  return MIXENH_OK;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json matrix_to_json(const mixenh::MixingMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 2; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < a.m; ++c) row.push_back(a.at(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

extern "C" {

const char* mixenh_status_name(mixenh_status status) {
  switch (status) {
    case MIXENH_OK:
      return "ok";
    case MIXENH_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case MIXENH_ERR_CONFIG:
      return "config_error";
    case MIXENH_ERR_IO:
      return "io_failure";
    case MIXENH_ERR_UNSUPPORTED_FORMAT:
      return "unsupported_format";
    case MIXENH_ERR_CORRUPT_FILE:
      return "corrupt_file";
    case MIXENH_ERR_EMPTY_SIGNAL:
      return "empty_signal";
    case MIXENH_ERR_SILENT_SIGNAL:
      return "silent_signal";
    case MIXENH_ERR_SHAPE_MISMATCH:
      return "shape_mismatch";
    case MIXENH_ERR_EMPTY_MANIFEST:
      return "empty_manifest";
    case MIXENH_ERR_UNSUPPORTED_OUTPUTS:
      return "unsupported_outputs";
    case MIXENH_ERR_WRONG_KIND:
      return "wrong_kind";
    case MIXENH_ERR_MISSING_FORWARD_CONTEXT:
      return "missing_forward_context";
    case MIXENH_ERR_NONFINITE_ACTIVATION:
      return "non_finite_activation";
    case MIXENH_ERR_NONFINITE_GRADIENT:
      return "non_finite_gradient";
    case MIXENH_ERR_DIVERGED_LOSS:
      return "diverged_loss";
    case MIXENH_ERR_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

const char* mixenh_last_error(void) { return t_last_error.c_str(); }

void mixenh_string_free(char* s) { std::free(s); }

mixenh_status mixenh_build_manifest(const char* root_dir, const char* kind,
                                    const char* out_path, int64_t* out_count,
                                    int64_t* out_skipped) {
  if (auto st = require_args({root_dir, kind, out_path}); st != MIXENH_OK) {
    return st;
  }
  return guarded([&] {
    // At the C boundary a bad kind name is a bad argument and a missing scan
    // root is an I/O problem, regardless of how the core layers classify the
    // same conditions when they surface from manifest or config files.
    mixenh::ClipKind k;
    try {
      k = mixenh::kind_from_name(kind);
    } catch (const mixenh::Error&) {
      throw mixenh::Error(mixenh::ErrorCode::kInvalidArgument,
                          "unknown clip kind \"" + std::string(kind) + "\"");
    }
    if (!std::filesystem::is_directory(root_dir)) {
      throw mixenh::Error(mixenh::ErrorCode::kIoFailure,
                          "not a directory: " + std::string(root_dir));
    }
    const mixenh::ManifestBuildResult built = mixenh::build_manifest(root_dir, k);
    mixenh::write_manifest(built.manifest, out_path);
    if (out_count != nullptr) {
      *out_count = static_cast<int64_t>(built.manifest.entries.size());
    }
    if (out_skipped != nullptr) *out_skipped = built.skipped;
  });
}

mixenh_status mixenh_simulate(const char* out_dir, int n_clean, int n_noise,
                              int n_noisy, uint64_t seed) {
  if (auto st = require_args({out_dir}); st != MIXENH_OK) return st;
  return guarded([&] {
    mixenh::gen_synth_corpus(out_dir, n_clean, n_noise, n_noisy, seed);
  });
}

mixenh_status mixenh_enum_matrices(int num_outputs, char** out_json) {
  if (auto st = require_args({out_json}); st != MIXENH_OK) return st;
  return guarded([&] {
    nlohmann::json arr = nlohmann::json::array();
    for (const mixenh::MixingMatrix& a :
         mixenh::enumerate_allowed(num_outputs)) {
      arr.push_back(matrix_to_json(a));
    }
    *out_json = copy_string(arr.dump(2));
  });
}

mixenh_status mixenh_resolve_config(const char* config_path, char** out_json) {
  if (auto st = require_args({config_path, out_json}); st != MIXENH_OK) {
    return st;
  }
  return guarded([&] {
    const mixenh::RunConfig cfg = mixenh::load_run_config(config_path);
    *out_json = copy_string(mixenh::dump_run_config(cfg));
  });
}

mixenh_status mixenh_train_run(const char* config_path, const char* out_dir,
                               const uint64_t* seed_override,
                               char** out_summary_json) {
  if (auto st = require_args({config_path, out_dir}); st != MIXENH_OK) {
    return st;
  }
  return guarded([&] {
    mixenh::RunConfig cfg = mixenh::load_run_config(config_path);
    if (seed_override != nullptr) {
      cfg.train.seed = *seed_override;
      cfg.sampler.seed = *seed_override;
    }
    if (cfg.manifest.empty()) {
      throw mixenh::Error(mixenh::ErrorCode::kConfigError,
                          "config: key \"manifest\" is required for training");
    }
    const mixenh::Manifest train_manifest =
        mixenh::load_manifest(cfg.manifest);
    const mixenh::Manifest val_manifest =
        cfg.val_manifest.empty() ? train_manifest
                                 : mixenh::load_manifest(cfg.val_manifest);

    const std::filesystem::path out(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) {
      throw mixenh::Error(mixenh::ErrorCode::kIoFailure,
                          "train: cannot create " + out.string());
    }
    {
      std::ofstream echo(out / "resolved_config.json", std::ios::trunc);
      if (!echo) {
        throw mixenh::Error(
            mixenh::ErrorCode::kIoFailure,
            "train: cannot write " + (out / "resolved_config.json").string());
      }
      echo << mixenh::dump_run_config(cfg) << "\n";
    }

    const mixenh::TrainResult result =
        mixenh::train(train_manifest, val_manifest, cfg.model, cfg.sampler,
                      cfg.train, cfg.stft, out);
    if (out_summary_json != nullptr) {
      nlohmann::ordered_json summary{
          {"best_checkpoint", result.best_checkpoint.string()},
          {"metrics", result.metrics_path.string()},
          {"best_epoch", result.best_epoch},
          {"best_snri_db", result.best_snri_db}};
      *out_summary_json = copy_string(summary.dump(2));
    }
  });
}

mixenh_status mixenh_eval_snr(const char* clean_manifest,
                              const char* processed_dir,
                              const char* noisy_dir, const char* out_csv) {
  if (auto st = require_args({clean_manifest, processed_dir, noisy_dir,
                              out_csv});
      st != MIXENH_OK) {
    return st;
  }
  return guarded([&] {
    const mixenh::Manifest manifest = mixenh::load_manifest(clean_manifest);
    const auto rows =
        mixenh::eval_snr_rows(manifest, processed_dir, noisy_dir);
    mixenh::write_eval_csv(rows, out_csv);
  });
}

mixenh_status mixenh_gradcheck(uint64_t seed, int probes_per_group,
                               int inject_error, double* out_max_rel_err,
                               char** out_report_json) {
  return guarded([&] {
    mixenh::GradCheckConfig cfg;
    cfg.seed = seed;
    if (probes_per_group > 0) cfg.probes_per_group = probes_per_group;
    cfg.inject_error = inject_error != 0;
    const mixenh::GradCheckReport report = mixenh::run_gradcheck(cfg);
    if (out_max_rel_err != nullptr) *out_max_rel_err = report.max_rel_err;
    if (out_report_json != nullptr) {
      nlohmann::ordered_json j{{"max_rel_err", report.max_rel_err},
                               {"total_probes", report.total_probes},
                               {"skipped_probes", report.skipped_probes},
                               {"empty_groups", report.empty_groups},
                               {"worst_param", report.worst_param},
                               {"worst_index", report.worst_index},
                               {"worst_analytic", report.worst_analytic},
                               {"worst_numeric", report.worst_numeric},
                               {"tolerance", mixenh::kGradCheckTolerance}};
      *out_report_json = copy_string(j.dump(2));
    }
  });
}

struct mixenh_enhancer {
  mixenh::Enhancer impl;
};

mixenh_status mixenh_enhancer_open(const char* checkpoint_path,
                                   mixenh_enhancer** out_enhancer) {
  if (auto st = require_args({checkpoint_path, out_enhancer});
      st != MIXENH_OK) {
    return st;
  }
  return guarded([&] {
    auto handle = std::make_unique<mixenh_enhancer>();
    handle->impl = mixenh::load_enhancer(checkpoint_path);
    *out_enhancer = handle.release();
  });
}

void mixenh_enhancer_close(mixenh_enhancer* enhancer) { delete enhancer; }

mixenh_status mixenh_enhancer_run(mixenh_enhancer* enhancer,
                                  const char* in_path, const char* out_dir,
                                  const double* remix_beta_db,
                                  int* out_files) {
  if (auto st = require_args({enhancer, in_path, out_dir}); st != MIXENH_OK) {
    return st;
  }
  return guarded([&] {
    const int n =
        mixenh::enhance_tree(enhancer->impl, in_path, out_dir, remix_beta_db);
    if (out_files != nullptr) *out_files = n;
  });
}

}  // extern "C"
