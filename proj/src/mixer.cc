// src/mixer.cc

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

#include "mixer.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "error.h"

namespace mixenh {

double signal_power(const AudioClip& clip) {
  if (clip.samples.empty()) {
    throw Error(ErrorCode::kEmptySignal, "signal_power: empty signal");
  }
  double acc = 0.0;
  for (double s : clip.samples) acc += s * s;
  return acc / static_cast<double>(clip.samples.size());
}

double snr_gain(const AudioClip& primary, const AudioClip& secondary,
                double alpha_db) {
  if (primary.samples.size() != secondary.samples.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "snr_gain: length mismatch (" +
                    std::to_string(primary.samples.size()) + " vs " +
                    std::to_string(secondary.samples.size()) + ")");
  }
  const double p1 = signal_power(primary);
  const double p2 = signal_power(secondary);
  if (p1 <= 0.0 || p2 <= 0.0) {
    throw Error(ErrorCode::kSilentSignal, "snr_gain: silent signal");
  }
  return std::sqrt(p1 / p2) * std::pow(10.0, -alpha_db / 20.0);
}

AudioClip convolve_rir(const AudioClip& clip, const AudioClip& h) {
  if (h.samples.empty() || h.samples.size() >= clip.samples.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "convolve_rir: impulse response must be non-empty and "
                "shorter than the signal");
  }
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.assign(clip.samples.size(), 0.0);
  const size_t n = clip.samples.size();
  const size_t m = h.samples.size();
  for (size_t j = 0; j < m; ++j) {
    const double hj = h.samples[j];
    if (hj == 0.0) continue;
    for (size_t i = j; i < n; ++i) {
      out.samples[i] += hj * clip.samples[i - j];
    }
  }
  return out;
}

AudioClip synth_rir(RandomGen& rng) {
  constexpr int kTaps = 2048;
  AudioClip h;
  h.samples.resize(kTaps);
  h.samples[0] = 1.0;
  for (int i = 1; i < kTaps; ++i) {
    h.samples[static_cast<size_t>(i)] =
        0.3 * rng.normal() * std::exp(-6.0 * i / kTaps);
  }
  double energy = 0.0;
  for (double v : h.samples) energy += v * v;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : h.samples) v *= scale;
  return h;
}

void validate_config(const SamplerConfig& cfg) {
  if (cfg.snr_low_db > cfg.snr_high_db || cfg.clean_ratio < 0.0 ||
      cfg.clean_ratio > 1.0 || cfg.chunk_len < 1) {
    throw Error(ErrorCode::kConfigError,
                "sampler: need snr_low_db <= snr_high_db, clean_ratio in "
                "[0, 1] and chunk_len >= 1");
  }
}

ExampleSampler::ExampleSampler(const Manifest& manifest,
                               const SamplerConfig& cfg)
    : cfg_(cfg), rng_(cfg.seed), manifest_(manifest) {
  validate_config(cfg_);
  clean_ = manifest_.by_kind(ClipKind::kClean);
  noise_ = manifest_.by_kind(ClipKind::kNoise);
  noisy_ = manifest_.by_kind(ClipKind::kNoisy);
  if (noise_.empty()) {
    throw Error(ErrorCode::kEmptyManifest, "sampler: no noise entries");
  }
  if (cfg_.clean_ratio > 0.0 && clean_.empty()) {
    throw Error(ErrorCode::kEmptyManifest,
                "sampler: clean_ratio > 0 but no clean entries");
  }
  if (cfg_.clean_ratio < 1.0 && noisy_.empty()) {
    throw Error(ErrorCode::kEmptyManifest,
                "sampler: clean_ratio < 1 but no noisy entries");
  }
}

const AudioClip& ExampleSampler::cached_clip(const std::string& path) {
  auto it = cache_.find(path);
  if (it == cache_.end()) {
    it = cache_.emplace(path, std::make_unique<AudioClip>(read_wav(path))).first;
  }
  return *it->second;
}

AudioClip ExampleSampler::chunk_from(
    const std::vector<const ManifestEntry*>& entries) {
  const ManifestEntry* entry = entries[rng_.below(entries.size())];
  const AudioClip& clip = cached_clip(entry->path);
  const int64_t len = static_cast<int64_t>(clip.samples.size());
  const int64_t chunk = cfg_.chunk_len;

  AudioClip out;
  out.sample_rate = kSampleRate;
  out.samples.assign(static_cast<size_t>(chunk), 0.0);
  if (len >= chunk) {
    const size_t off = rng_.below(static_cast<size_t>(len - chunk + 1));
    std::copy(clip.samples.begin() + static_cast<int64_t>(off),
              clip.samples.begin() + static_cast<int64_t>(off) + chunk,
              out.samples.begin());
  } else {
    // Short source clips are zero-padded at the tail, never looped.
    std::copy(clip.samples.begin(), clip.samples.end(), out.samples.begin());
  }
  return out;
}

MixExample ExampleSampler::next() {
  const bool clean = rng_.uniform01() < cfg_.clean_ratio;

  constexpr int kMaxAttempts = 10;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    AudioClip primary = chunk_from(clean ? clean_ : noisy_);
    if (clean && cfg_.rir_enabled) {
      AudioClip h = synth_rir(rng_);
      primary = convolve_rir(primary, h);
    }
    if (signal_power(primary) <= 0.0) continue;

    AudioClip noise = chunk_from(noise_);
    if (signal_power(noise) <= 0.0) continue;

    const double alpha_db = rng_.uniform(cfg_.snr_low_db, cfg_.snr_high_db);
    const double g = snr_gain(primary, noise, alpha_db);

    MixExample ex;
    ex.kind = clean ? ExampleKind::kCleanTarget : ExampleKind::kRealNoisy;
    ex.alpha_db = alpha_db;
    ex.refs[0] = std::move(primary);
    ex.refs[1].sample_rate = kSampleRate;
    ex.refs[1].samples.resize(noise.samples.size());
    for (size_t i = 0; i < noise.samples.size(); ++i) {
      ex.refs[1].samples[i] = g * noise.samples[i];
    }
    ex.input.sample_rate = kSampleRate;
    ex.input.samples.resize(ex.refs[0].samples.size());
    for (size_t i = 0; i < ex.input.samples.size(); ++i) {
      ex.input.samples[i] = ex.refs[0].samples[i] + ex.refs[1].samples[i];
    }
    return ex;
  }
  throw Error(ErrorCode::kSilentSignal,
              "sampler: drew silent material 10 times in a row");
}

}  // namespace mixenh
