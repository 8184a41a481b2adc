// src/config.h

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

#ifndef MIXENH_SRC_CONFIG_H_
#define MIXENH_SRC_CONFIG_H_

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dsp.h"
#include "mixer.h"
#include "model.h"
#include "postproc.h"
#include "trainer.h"

namespace mixenh {

// Aggregated run description loaded from a JSON document. Every field has a
// default; unknown keys are rejected by name; manifest paths are resolved
// against the config file's directory.
struct RunConfig {
  ModelConfig model;
  SamplerConfig sampler;
  TrainConfig train;
  RemixConfig remix;
  StftConfig stft;
  std::string manifest;      // training manifest (absolute once loaded)
  std::string val_manifest;  // empty: validate on `manifest`
};

// Parses and validates a RunConfig, resolving paths against base_dir.
// Throws ConfigError naming the offending key on unknown/ill-typed keys.
RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Resolved-config dump: every field echoed, defaults included. Valid JSON.
std::string dump_run_config(const RunConfig& cfg);

// Extracts the "model" and "stft" sections from a checkpoint sidecar
// document (other keys, e.g. epoch/step, are ignored). Missing sections
// leave the defaults in place. Throws CorruptFile on malformed JSON and
// ConfigError on invalid field values.
void parse_checkpoint_sidecar(const std::string& text, ModelConfig* model,
                              StftConfig* stft);

// ADL serializers for the component configs (used by checkpoints' sidecar
// files and the resolved dump).
void to_json(nlohmann::json& j, const ModelConfig& cfg);
void to_json(nlohmann::json& j, const SamplerConfig& cfg);
void to_json(nlohmann::json& j, const TrainConfig& cfg);
void to_json(nlohmann::json& j, const RemixConfig& cfg);
void to_json(nlohmann::json& j, const StftConfig& cfg);

}  // namespace mixenh

#endif  // MIXENH_SRC_CONFIG_H_
