// src/synth-corpus.cc

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

#include "synth-corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "error.h"
#include "mixer.h"
#include "rng.h"

namespace mixenh {
namespace {

constexpr int kClipLen = 4 * kSampleRate;  // 4 s

// Seed-derivation tags, one namespace per clip kind so that e.g. changing
// n_clean never shifts the noise clips.
enum : uint64_t { kTagClean = 1, kTagNoise = 2, kTagNoisy = 3 };

void scale_to_peak(std::vector<double>& s, double peak) {
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  if (m == 0.0) return;
  const double g = peak / m;
  for (double& v : s) v *= g;
}

// Sum of 3-6 harmonics of a random fundamental, with a slow sinusoidal
// amplitude envelope. Peak is kept well below 1, so the power floor of 1e-4
// and the no-clipping requirement both hold by construction.
AudioClip make_clean_style(RandomGen& rng) {
  const double f0 = rng.uniform(90.0, 300.0);
  const int n_harm = 3 + static_cast<int>(rng.below(4));
  const double am_freq = rng.uniform(0.5, 4.0);
  const double am_depth = rng.uniform(0.2, 0.5);
  const double am_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double peak = rng.uniform(0.3, 0.9);

  std::vector<double> amp(static_cast<size_t>(n_harm));
  std::vector<double> phase(static_cast<size_t>(n_harm));
  for (int h = 0; h < n_harm; ++h) {
    amp[static_cast<size_t>(h)] = rng.uniform(0.3, 1.0) / (h + 1);
    phase[static_cast<size_t>(h)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  AudioClip clip;
  clip.samples.resize(kClipLen);
  for (int i = 0; i < kClipLen; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    double v = 0.0;
    for (int h = 0; h < n_harm; ++h) {
      v += amp[static_cast<size_t>(h)] *
           std::sin(2.0 * std::numbers::pi * f0 * (h + 1) * t +
                    phase[static_cast<size_t>(h)]);
    }
    const double env =
        1.0 + am_depth * std::sin(2.0 * std::numbers::pi * am_freq * t +
                                  am_phase);
    clip.samples[static_cast<size_t>(i)] = v * env;
  }
  scale_to_peak(clip.samples, peak);
  return clip;
}

// White noise through an RBJ-style 2nd-order low-pass biquad.
AudioClip make_noise_style(RandomGen& rng) {
  const double fc = rng.uniform(500.0, 4000.0);
  const double q = rng.uniform(0.5, 1.0);
  const double peak = rng.uniform(0.3, 0.9);

  const double w = 2.0 * std::numbers::pi * fc / kSampleRate;
  const double alpha = std::sin(w) / (2.0 * q);
  const double cw = std::cos(w);
  const double a0 = 1.0 + alpha;
  const double b0 = (1.0 - cw) / 2.0 / a0;
  const double b1 = (1.0 - cw) / a0;
  const double b2 = (1.0 - cw) / 2.0 / a0;
  const double a1 = -2.0 * cw / a0;
  const double a2 = (1.0 - alpha) / a0;

  AudioClip clip;
  clip.samples.resize(kClipLen);
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (int i = 0; i < kClipLen; ++i) {
    const double x = rng.normal();
    const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    clip.samples[static_cast<size_t>(i)] = y;
  }
  scale_to_peak(clip.samples, peak);
  return clip;
}

// Held-out clean-style + noise-style material mixed at a random SNR, then
// bent through tanh(d*x)/d. The curve keeps |y| < 1/d <= 1, so no clipping.
AudioClip make_noisy_style(RandomGen& rng) {
  AudioClip speech = make_clean_style(rng);
  AudioClip noise = make_noise_style(rng);
  const double alpha_db = rng.uniform(-5.0, 5.0);
  const double g = snr_gain(speech, noise, alpha_db);
  const double drive = rng.uniform(1.0, 2.5);

  AudioClip clip;
  clip.samples.resize(kClipLen);
  for (int i = 0; i < kClipLen; ++i) {
    const size_t s = static_cast<size_t>(i);
    clip.samples[s] = std::tanh(drive * (speech.samples[s] + g * noise.samples[s])) / drive;
  }
  return clip;
}

std::string clip_name(const char* stem, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d.wav", stem, index);
  return buf;
}

}  // namespace

Manifest gen_synth_corpus(const std::filesystem::path& out_dir, int n_clean,
                          int n_noise, int n_noisy, uint64_t seed) {
  if (n_clean < 0 || n_noise < 0 || n_noisy < 0) {
    throw Error(ErrorCode::kInvalidArgument, "gen_synth_corpus: negative count");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "gen_synth_corpus: cannot create " + out_dir.string());
  }

  struct KindPlan {
    const char* stem;
    ClipKind kind;
    uint64_t tag;
    int count;
    AudioClip (*make)(RandomGen&);
  };
  const KindPlan plans[] = {
      {"clean", ClipKind::kClean, kTagClean, n_clean, &make_clean_style},
      {"noise", ClipKind::kNoise, kTagNoise, n_noise, &make_noise_style},
      {"noisy", ClipKind::kNoisy, kTagNoisy, n_noisy, &make_noisy_style},
  };

  Manifest all;
  for (const KindPlan& plan : plans) {
    const std::filesystem::path dir = out_dir / plan.stem;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw Error(ErrorCode::kIoFailure,
                  "gen_synth_corpus: cannot create " + dir.string());
    }
    Manifest per_kind;
    for (int i = 0; i < plan.count; ++i) {
      RandomGen rng(derive_seed(seed, plan.tag, static_cast<uint64_t>(i)));
      const AudioClip clip = plan.make(rng);
      const std::filesystem::path path = dir / clip_name(plan.stem, i);
      write_wav(clip, path);
      ManifestEntry entry;
      entry.path = std::filesystem::absolute(path).lexically_normal().string();
      entry.kind = plan.kind;
      entry.duration_s =
          static_cast<double>(clip.samples.size()) / kSampleRate;
      per_kind.entries.push_back(entry);
    }
    write_manifest(per_kind, out_dir / (std::string(plan.stem) + ".jsonl"));
    all.append(per_kind);
  }
  write_manifest(all, out_dir / "all.jsonl");
  return all;
}

}  // namespace mixenh
