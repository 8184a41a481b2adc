// src/enhance.h

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

#ifndef MIXENH_SRC_ENHANCE_H_
#define MIXENH_SRC_ENHANCE_H_

#include <filesystem>

#include "audio-io.h"
#include "dsp.h"
#include "model.h"

namespace mixenh {

// A trained model ready for inference.
struct Enhancer {
  Parameters params;
  ModelConfig model;
  StftConfig stft;
};

// Loads weights from a checkpoint plus its JSON sidecar (same stem, .json
// extension) for the model and analysis setup. Throws IoFailure when either
// file is missing, CorruptFile/UnsupportedFormat per the checkpoint codec.
Enhancer load_enhancer(const std::filesystem::path& checkpoint_path);

// Denoises one clip: analysis transform, network forward, synthesis of the
// speech channel. Output has the input's length.
AudioClip enhance_clip(const Enhancer& enh, const AudioClip& noisy);

// File-in/file-out wrapper; with remix_beta_db, the enhanced signal is
// blended with the unprocessed input at that SNR before writing.
void enhance_file(const Enhancer& enh, const std::filesystem::path& in_wav,
                  const std::filesystem::path& out_wav,
                  const double* remix_beta_db);

// in_path may be a single WAV or a directory (every *.wav directly inside,
// in name order). Outputs mirror the input file names under out_dir.
// Returns the number of files written.
int enhance_tree(const Enhancer& enh, const std::filesystem::path& in_path,
                 const std::filesystem::path& out_dir,
                 const double* remix_beta_db);

}  // namespace mixenh

#endif  // MIXENH_SRC_ENHANCE_H_
