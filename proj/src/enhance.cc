// src/enhance.cc

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

#include "enhance.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "checkpoint.h"
#include "config.h"
#include "error.h"
#include "postproc.h"

namespace mixenh {

Enhancer load_enhancer(const std::filesystem::path& checkpoint_path) {
  Enhancer enh;
  enh.params = load_checkpoint(checkpoint_path);

  std::filesystem::path sidecar = checkpoint_path;
  sidecar.replace_extension(".json");
  std::ifstream stream(sidecar);
  if (!stream) {
    throw Error(ErrorCode::kIoFailure,
                "enhance: missing checkpoint sidecar " + sidecar.string());
  }
  std::ostringstream text;
  text << stream.rdbuf();
  parse_checkpoint_sidecar(text.str(), &enh.model, &enh.stft);

  // Cheap consistency probe: the head bias length encodes 2M.
  const auto it = enh.params.values.find("head.b");
  if (it == enh.params.values.end() ||
      it->second.numel() != 2 * enh.model.num_outputs) {
    throw Error(ErrorCode::kCorruptFile,
                "enhance: checkpoint does not match its sidecar model config");
  }
  return enh;
}

AudioClip enhance_clip(const Enhancer& enh, const AudioClip& noisy) {
  const Spectrogram mix = stft(noisy, enh.stft);
  const SourceEstimates est = run_forward(enh.params, enh.model, mix);
  return istft(est.specs[0]);
}

void enhance_file(const Enhancer& enh, const std::filesystem::path& in_wav,
                  const std::filesystem::path& out_wav,
                  const double* remix_beta_db) {
  const AudioClip noisy = read_wav(in_wav);
  AudioClip out = enhance_clip(enh, noisy);
  if (remix_beta_db != nullptr) {
    out = remix(out, noisy, *remix_beta_db);
  }
  write_wav(out, out_wav);
}

int enhance_tree(const Enhancer& enh, const std::filesystem::path& in_path,
                 const std::filesystem::path& out_dir,
                 const double* remix_beta_db) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "enhance: cannot create " + out_dir.string());
  }

  std::vector<std::filesystem::path> inputs;
  if (std::filesystem::is_directory(in_path)) {
    for (const auto& entry : std::filesystem::directory_iterator(in_path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".wav") {
        inputs.push_back(entry.path());
      }
    }
    std::sort(inputs.begin(), inputs.end());
  } else if (std::filesystem::is_regular_file(in_path)) {
    inputs.push_back(in_path);
  } else {
    throw Error(ErrorCode::kIoFailure,
                "enhance: no such file or directory: " + in_path.string());
  }

  for (const auto& in : inputs) {
    enhance_file(enh, in, out_dir / in.filename(), remix_beta_db);
  }
  return static_cast<int>(inputs.size());
}

}  // namespace mixenh
