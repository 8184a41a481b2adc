// src/audio-io.h

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

#ifndef MIXENH_SRC_AUDIO_IO_H_
#define MIXENH_SRC_AUDIO_IO_H_

#include <filesystem>
#include <string>
#include <vector>

namespace mixenh {

inline constexpr int kSampleRate = 16000;

// Mono waveform, dimensionless amplitude with nominal range [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kSampleRate;
};

// Only RIFF/WAVE, format tag 1 (PCM), 1 channel, 16 bit, 16 kHz is accepted.
// Integer samples are mapped to reals by dividing by 32768, so -32768 decodes
// to exactly -1.0.
AudioClip read_wav(const std::filesystem::path& path);

// Writes 16-bit PCM. Samples are clamped to [-1, 1], scaled by 32768, rounded
// half away from zero and clamped to the int16 range (so +1.0 encodes to
// 32767). Together with the decode rule above the PCM payload round-trips
// bit-exactly.
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

// Header-only probe, used when building manifests.
struct WavInfo {
  uint32_t sample_rate = 0;
  uint64_t num_samples = 0;
};
WavInfo read_wav_info(const std::filesystem::path& path);

enum class ClipKind { kClean, kNoise, kNoisy };

const char* kind_name(ClipKind kind);
ClipKind kind_from_name(const std::string& name);

struct ManifestEntry {
  std::string path;  // absolute once loaded/built
  ClipKind kind = ClipKind::kClean;
  double duration_s = 0.0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> by_kind(ClipKind kind) const;
  void append(const Manifest& other);
};

struct ManifestBuildResult {
  Manifest manifest;
  int skipped = 0;  // unreadable or unsupported files
};

// Scans `root` recursively for .wav files. Entries are lexicographically
// sorted by path; files that fail to parse are skipped and counted.
ManifestBuildResult build_manifest(const std::filesystem::path& root,
                                   ClipKind kind);

// JSON-lines serialization, one {"path","kind","duration_s"} object per line.
// Paths are written relative to the manifest's directory when possible and
// resolved back against it on load.
void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& out_path);
Manifest load_manifest(const std::filesystem::path& path);

std::string serialize_manifest(const Manifest& manifest,
                               const std::filesystem::path& base_dir);

}  // namespace mixenh

#endif  // MIXENH_SRC_AUDIO_IO_H_
