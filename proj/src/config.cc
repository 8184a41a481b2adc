// src/config.cc

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

#include "config.h"

#include <cmath>
#include <fstream>
#include <set>

#include "error.h"

namespace mixenh {
namespace {

// Walks one JSON object, handing out typed fields and complaining (by full
// dotted key name) about anything it does not recognize.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) {
      throw Error(ErrorCode::kConfigError,
                  "config: " + where() + " must be a JSON object");
    }
  }

  void number(const char* key, double* out) {
    const nlohmann::json* v = get(key);
    if (v == nullptr) return;
    if (!v->is_number()) bad_type(key, "a number");
    *out = v->get<double>();
  }

  void integer(const char* key, int* out) {
    const nlohmann::json* v = get(key);
    if (v == nullptr) return;
    if (!v->is_number_integer()) bad_type(key, "an integer");
    *out = v->get<int>();
  }

  void unsigned64(const char* key, uint64_t* out) {
    const nlohmann::json* v = get(key);
    if (v == nullptr) return;
    if (!v->is_number_unsigned()) bad_type(key, "an unsigned integer");
    *out = v->get<uint64_t>();
  }

  void boolean(const char* key, bool* out) {
    const nlohmann::json* v = get(key);
    if (v == nullptr) return;
    if (!v->is_boolean()) bad_type(key, "a boolean");
    *out = v->get<bool>();
  }

  void string(const char* key, std::string* out) {
    const nlohmann::json* v = get(key);
    if (v == nullptr) return;
    if (!v->is_string()) bad_type(key, "a string");
    *out = v->get<std::string>();
  }

  // Object-valued subsection; null when absent.
  const nlohmann::json* section(const char* key) { return get(key); }

  // Rejects keys nobody consumed.
  void finish() {
    for (const auto& [key, value] : j_.items()) {
      if (!consumed_.count(key)) {
        throw Error(ErrorCode::kConfigError,
                    "config: unknown key \"" + dotted(key) + "\"");
      }
    }
  }

 private:
  std::string where() const { return prefix_.empty() ? "root" : prefix_; }
  std::string dotted(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }
  const nlohmann::json* get(const char* key) {
    consumed_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  [[noreturn]] void bad_type(const char* key, const char* want) {
    throw Error(ErrorCode::kConfigError, "config: key \"" + dotted(key) +
                                             "\" must be " + want);
  }

  const nlohmann::json& j_;
  std::string prefix_;
  std::set<std::string> consumed_;
};

const char* mode_name(MinMode mode) {
  return mode == MinMode::kPerTerm ? "per_term" : "joint";
}

MinMode mode_from_name(const std::string& name) {
  if (name == "per_term") return MinMode::kPerTerm;
  if (name == "joint") return MinMode::kJoint;
  throw Error(ErrorCode::kConfigError,
              "config: key \"train.loss_mode\" must be \"per_term\" or "
              "\"joint\", got \"" +
                  name + "\"");
}

void parse_model(const nlohmann::json& j, ModelConfig* cfg) {
  ObjectReader r(j, "model");
  r.integer("num_outputs", &cfg->num_outputs);
  r.integer("base_channels", &cfg->base_channels);
  r.integer("enc_depth", &cfg->enc_depth);
  r.integer("tcn_repeats", &cfg->tcn_repeats);
  r.integer("tcn_blocks", &cfg->tcn_blocks);
  r.finish();
}

void parse_sampler(const nlohmann::json& j, SamplerConfig* cfg) {
  ObjectReader r(j, "sampler");
  r.number("snr_low_db", &cfg->snr_low_db);
  r.number("snr_high_db", &cfg->snr_high_db);
  r.number("clean_ratio", &cfg->clean_ratio);
  r.integer("chunk_len", &cfg->chunk_len);
  r.unsigned64("seed", &cfg->seed);
  r.boolean("rir_enabled", &cfg->rir_enabled);
  r.finish();
}

void parse_train(const nlohmann::json& j, TrainConfig* cfg) {
  ObjectReader r(j, "train");
  r.number("lr", &cfg->lr);
  r.integer("batch_size", &cfg->batch_size);
  r.integer("epochs", &cfg->epochs);
  r.integer("steps_per_epoch", &cfg->steps_per_epoch);
  r.integer("plateau_patience", &cfg->plateau_patience);
  r.number("lr_factor", &cfg->lr_factor);
  r.number("adam_beta1", &cfg->adam_beta1);
  r.number("adam_beta2", &cfg->adam_beta2);
  r.number("adam_eps", &cfg->adam_eps);
  r.unsigned64("seed", &cfg->seed);
  std::string mode = mode_name(cfg->loss_mode);
  r.string("loss_mode", &mode);
  cfg->loss_mode = mode_from_name(mode);
  r.boolean("supervised", &cfg->supervised);
  r.integer("val_examples", &cfg->val_examples);
  r.finish();
}

void parse_remix(const nlohmann::json& j, RemixConfig* cfg) {
  ObjectReader r(j, "remix");
  r.number("beta_db", &cfg->beta_db);
  r.finish();
}

void parse_stft(const nlohmann::json& j, StftConfig* cfg) {
  ObjectReader r(j, "stft");
  r.integer("frame_len", &cfg->frame_len);
  r.integer("hop", &cfg->hop);
  r.finish();
}

std::string resolve_path(const std::string& p,
                         const std::filesystem::path& base_dir) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_relative()) fp = base_dir / fp;
  return std::filesystem::absolute(fp).lexically_normal().string();
}

}  // namespace

RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    // Covers syntax errors and out-of-range literals such as 1e999.
    throw Error(ErrorCode::kConfigError,
                std::string("config: invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  ObjectReader root(j, "");
  if (const nlohmann::json* s = root.section("model")) {
    parse_model(*s, &cfg.model);
  }
  if (const nlohmann::json* s = root.section("sampler")) {
    parse_sampler(*s, &cfg.sampler);
  }
  if (const nlohmann::json* s = root.section("train")) {
    parse_train(*s, &cfg.train);
  }
  if (const nlohmann::json* s = root.section("remix")) {
    parse_remix(*s, &cfg.remix);
  }
  if (const nlohmann::json* s = root.section("stft")) {
    parse_stft(*s, &cfg.stft);
  }
  root.string("manifest", &cfg.manifest);
  root.string("val_manifest", &cfg.val_manifest);
  root.finish();

  validate_config(cfg.model);
  validate_config(cfg.train);
  validate_config(cfg.sampler);
  validate_config(cfg.stft);
  if (!std::isfinite(cfg.remix.beta_db)) {
    throw Error(ErrorCode::kConfigError,
                "config: key \"remix.beta_db\" must be finite");
  }
  cfg.manifest = resolve_path(cfg.manifest, base_dir);
  cfg.val_manifest = resolve_path(cfg.val_manifest, base_dir);
  return cfg;
}

void parse_checkpoint_sidecar(const std::string& text, ModelConfig* model,
                              StftConfig* stft) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptFile,
                std::string("sidecar: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kCorruptFile, "sidecar: not a JSON object");
  }
  ObjectReader root(j, "");
  if (const nlohmann::json* s = root.section("model")) {
    parse_model(*s, model);
  }
  if (const nlohmann::json* s = root.section("stft")) {
    parse_stft(*s, stft);
  }
  validate_config(*model);
  validate_config(*stft);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream stream(path);
  if (!stream) {
    throw Error(ErrorCode::kIoFailure,
                "config: cannot open " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(stream)),
                   std::istreambuf_iterator<char>());
  return parse_run_config(text, std::filesystem::absolute(path).parent_path());
}

void to_json(nlohmann::json& j, const ModelConfig& cfg) {
  j = nlohmann::json{{"num_outputs", cfg.num_outputs},
                     {"base_channels", cfg.base_channels},
                     {"enc_depth", cfg.enc_depth},
                     {"tcn_repeats", cfg.tcn_repeats},
                     {"tcn_blocks", cfg.tcn_blocks}};
}

void to_json(nlohmann::json& j, const SamplerConfig& cfg) {
  j = nlohmann::json{{"snr_low_db", cfg.snr_low_db},
                     {"snr_high_db", cfg.snr_high_db},
                     {"clean_ratio", cfg.clean_ratio},
                     {"chunk_len", cfg.chunk_len},
                     {"seed", cfg.seed},
                     {"rir_enabled", cfg.rir_enabled}};
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = nlohmann::json{{"lr", cfg.lr},
                     {"batch_size", cfg.batch_size},
                     {"epochs", cfg.epochs},
                     {"steps_per_epoch", cfg.steps_per_epoch},
                     {"plateau_patience", cfg.plateau_patience},
                     {"lr_factor", cfg.lr_factor},
                     {"adam_beta1", cfg.adam_beta1},
                     {"adam_beta2", cfg.adam_beta2},
                     {"adam_eps", cfg.adam_eps},
                     {"seed", cfg.seed},
                     {"loss_mode", mode_name(cfg.loss_mode)},
                     {"supervised", cfg.supervised},
                     {"val_examples", cfg.val_examples}};
}

void to_json(nlohmann::json& j, const RemixConfig& cfg) {
  j = nlohmann::json{{"beta_db", cfg.beta_db}};
}

void to_json(nlohmann::json& j, const StftConfig& cfg) {
  j = nlohmann::json{{"frame_len", cfg.frame_len}, {"hop", cfg.hop}};
}

std::string dump_run_config(const RunConfig& cfg) {
  nlohmann::json j{{"model", cfg.model},
                   {"sampler", cfg.sampler},
                   {"train", cfg.train},
                   {"remix", cfg.remix},
                   {"stft", cfg.stft},
                   {"manifest", cfg.manifest},
                   {"val_manifest", cfg.val_manifest}};
  return j.dump(2);
}

}  // namespace mixenh
