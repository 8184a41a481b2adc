// src/synth-corpus.h

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

#ifndef MIXENH_SRC_SYNTH_CORPUS_H_
#define MIXENH_SRC_SYNTH_CORPUS_H_

#include <filesystem>

#include "audio-io.h"

namespace mixenh {

// Writes a small synthetic corpus under out_dir:
//
//   clean/  harmonic tones (3-6 partials, fundamental in [90, 300] Hz) with
//           slow amplitude modulation,
//   noise/  white noise shaped by a random 2nd-order low-pass,
//   noisy/  held-out clean-style + noise-style signals mixed at a random SNR
//           in [-5, 5] dB, then passed through a mild tanh curve so the
//           "real" domain is not exactly the simulated one.
//
// Every clip is 4 s at 16 kHz. Per-kind manifests (clean.jsonl, noise.jsonl,
// noisy.jsonl) and a combined all.jsonl are written next to the directories.
// The same seed reproduces the tree byte for byte. Returns the combined
// manifest.
Manifest gen_synth_corpus(const std::filesystem::path& out_dir, int n_clean,
                          int n_noise, int n_noisy, uint64_t seed);

}  // namespace mixenh

#endif  // MIXENH_SRC_SYNTH_CORPUS_H_
