// src/mixer.h

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

#ifndef MIXENH_SRC_MIXER_H_
#define MIXENH_SRC_MIXER_H_

#include <array>
#include <memory>
#include <string>
#include <unordered_map>

#include "audio-io.h"
#include "rng.h"

namespace mixenh {

// Mean squared amplitude.
double signal_power(const AudioClip& clip);

// Gain g such that mixing primary + g * secondary realizes the SNR alpha_db
// between the two, measured over full-signal power:
//   g = sqrt(power(primary) / power(secondary)) * 10^(-alpha_db / 20).
double snr_gain(const AudioClip& primary, const AudioClip& secondary,
                double alpha_db);

// Linear FIR convolution truncated to the input length.
AudioClip convolve_rir(const AudioClip& clip, const AudioClip& h);

enum class ExampleKind { kCleanTarget, kRealNoisy };

// One training item. The stored noise reference refs[1] is pre-scaled, so
// input == refs[0] + refs[1] holds exactly and the measured SNR between the
// references equals alpha_db.
struct MixExample {
  AudioClip input;
  std::array<AudioClip, 2> refs;
  ExampleKind kind = ExampleKind::kCleanTarget;
  double alpha_db = 0.0;
};

struct SamplerConfig {
  double snr_low_db = -5.0;
  double snr_high_db = 5.0;
  double clean_ratio = 0.5;  // P(kind == clean_target)
  int chunk_len = 32000;     // 2 s at 16 kHz
  uint64_t seed = 0;
  bool rir_enabled = false;

  bool operator==(const SamplerConfig&) const = default;
};

// Throws ConfigError on an empty SNR range, clean_ratio outside [0, 1] or a
// non-positive chunk length.
void validate_config(const SamplerConfig& cfg);

// Draws MixExamples from a manifest. With probability clean_ratio the primary
// reference is a clean chunk (optionally convolved with a synthetic impulse
// response), otherwise a real-noisy chunk; the secondary is always a noise
// chunk scaled to a uniformly sampled SNR. Decoded clips are cached.
class ExampleSampler {
 public:
  ExampleSampler(const Manifest& manifest, const SamplerConfig& cfg);

  MixExample next();

  const SamplerConfig& config() const { return cfg_; }

 private:
  AudioClip chunk_from(const std::vector<const ManifestEntry*>& entries);
  const AudioClip& cached_clip(const std::string& path);

  SamplerConfig cfg_;
  RandomGen rng_;
  std::vector<const ManifestEntry*> clean_, noise_, noisy_;
  Manifest manifest_;
  std::unordered_map<std::string, std::unique_ptr<AudioClip>> cache_;
};

// 2048-sample exponentially decaying noise burst with a unit direct path,
// normalized to unit energy.
AudioClip synth_rir(RandomGen& rng);

}  // namespace mixenh

#endif  // MIXENH_SRC_MIXER_H_
