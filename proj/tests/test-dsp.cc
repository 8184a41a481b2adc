// tests/test-dsp.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "dsp.h"
#include "error.h"
#include "test-util.h"

using namespace mixenh;

namespace {

// Independent re-derivation of one analysis frame: reflect the signal around
// its end points, window with sin(pi n / N) (the square root of a periodic
// Hann), and take a direct O(N^2) DFT.
std::vector<std::complex<double>> naive_frame(const std::vector<double>& x,
                                              int frame_index,
                                              const StftConfig& cfg) {
  const int n = cfg.frame_len;
  const int pad = n / 2;
  const int64_t len = static_cast<int64_t>(x.size());
  auto sample_at = [&](int64_t t) {
    if (t < 0) t = -t;                        // single fold suffices when
    if (t >= len) t = 2 * (len - 1) - t;      // pad < len - 1
    return x[static_cast<size_t>(t)];
  };

  std::vector<double> windowed(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double w = std::sin(M_PI * i / n);
    windowed[static_cast<size_t>(i)] =
        w * sample_at(static_cast<int64_t>(frame_index) * cfg.hop - pad + i);
  }

  std::vector<std::complex<double>> spec(static_cast<size_t>(n / 2 + 1));
  for (int f = 0; f <= n / 2; ++f) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      const double phase = -2.0 * M_PI * f * i / n;
      acc += windowed[static_cast<size_t>(i)] *
             std::complex<double>(std::cos(phase), std::sin(phase));
    }
    spec[static_cast<size_t>(f)] = acc;
  }
  return spec;
}

}  // namespace

TEST_CASE("stft shape and zero propagation") {
  AudioClip zero;
  zero.samples.assign(32000, 0.0);
  const Spectrogram spec = stft(zero, StftConfig{});
  CHECK(spec.bins == 257);
  CHECK(spec.frames == 251);
  for (const auto& z : spec.data) {
    CHECK(z.real() == 0.0);
    CHECK(z.imag() == 0.0);
  }
}

TEST_CASE("stft matches a direct DFT oracle on every frame") {
  RandomGen rng(11);
  const AudioClip clip = testing::random_clip(1000, &rng);
  const StftConfig cfg;
  const Spectrogram spec = stft(clip, cfg);
  REQUIRE(spec.frames == 1 + 1000 / cfg.hop);

  double worst = 0.0;
  for (int k = 0; k < spec.frames; ++k) {
    const auto oracle = naive_frame(clip.samples, k, cfg);
    for (int f = 0; f < spec.bins; ++f) {
      const double err = std::abs(spec.at(f, k) - oracle[static_cast<size_t>(f)]);
      worst = std::max(worst, err / (1.0 + std::abs(oracle[static_cast<size_t>(f)])));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("stft is linear") {
  RandomGen rng(12);
  const AudioClip a = testing::random_clip(3000, &rng);
  const AudioClip b = testing::random_clip(3000, &rng);
  AudioClip sum;
  sum.samples.resize(3000);
  for (int i = 0; i < 3000; ++i) {
    sum.samples[static_cast<size_t>(i)] =
        a.samples[static_cast<size_t>(i)] + b.samples[static_cast<size_t>(i)];
  }
  const Spectrogram sa = stft(a, StftConfig{});
  const Spectrogram sb = stft(b, StftConfig{});
  const Spectrogram ss = stft(sum, StftConfig{});
  for (size_t i = 0; i < ss.data.size(); ++i) {
    CHECK(std::abs(ss.data[i] - (sa.data[i] + sb.data[i])) <= 1e-12);
  }
}

TEST_CASE("bin-centered cosine concentrates in one bin") {
  // f = 16000 * 32 / 512 = 1000 Hz lands exactly on bin 32.
  const int bin = 32;
  AudioClip clip;
  clip.samples.resize(32000);
  for (int t = 0; t < 32000; ++t) {
    clip.samples[static_cast<size_t>(t)] =
        0.5 * std::cos(2.0 * M_PI * bin * t / 512.0);
  }
  const Spectrogram spec = stft(clip, StftConfig{});

  // Away from the reflect-padded edges, the peak bin must dominate all bins
  // outside the window main lobe (immediate neighbors) by 20 dB or more.
  for (int k = 4; k < spec.frames - 4; ++k) {
    const double peak = std::abs(spec.at(bin, k));
    double rest = 0.0;
    for (int f = 0; f < spec.bins; ++f) {
      if (std::abs(f - bin) <= 1) continue;
      rest = std::max(rest, std::abs(spec.at(f, k)));
    }
    REQUIRE(rest > 0.0);
    CHECK(20.0 * std::log10(peak / rest) >= 20.0);
  }
}

TEST_CASE("istft round trip is exact in shape and tight in value") {
  RandomGen rng(13);
  for (int len : {128, 1000, 32000}) {
    AudioClip clip = testing::random_clip(len, &rng, 1.0);
    const AudioClip back = istft(stft(clip, StftConfig{}));
    REQUIRE(back.samples.size() == clip.samples.size());
    double worst = 0.0;
    for (size_t i = 0; i < clip.samples.size(); ++i) {
      worst = std::max(worst, std::abs(back.samples[i] - clip.samples[i]));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("all-zero spectrogram synthesizes silence") {
  Spectrogram spec;
  spec.bins = 257;
  spec.frames = 11;
  spec.config = StftConfig{};
  spec.num_samples = 1280;
  spec.data.assign(static_cast<size_t>(257 * 11), {0.0, 0.0});
  const AudioClip out = istft(spec);
  REQUIRE(out.samples.size() == 1280);
  for (double s : out.samples) CHECK(s == 0.0);
}

TEST_CASE("components splits re/im/magnitude") {
  Spectrogram spec;
  spec.bins = 2;
  spec.frames = 1;
  spec.num_samples = 1;
  spec.data = {{3.0, 4.0}, {0.0, 0.0}};
  const Components c = components(spec);
  CHECK(c.re.data[0] == 3.0);
  CHECK(c.im.data[0] == 4.0);
  CHECK(c.mag.data[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(c.mag.data[1] == 0.0);

  Spectrogram conj = spec;
  for (auto& z : conj.data) z = std::conj(z);
  const Components cc = components(conj);
  for (size_t i = 0; i < c.mag.data.size(); ++i) {
    CHECK(cc.mag.data[i] == c.mag.data[i]);
  }
}

TEST_CASE("Parseval consistency per frame") {
  RandomGen rng(14);
  const AudioClip clip = testing::random_clip(2000, &rng);
  const StftConfig cfg;
  const Spectrogram spec = stft(clip, cfg);

  for (int k : {0, 3, 7, spec.frames - 1}) {
    const auto frame = naive_frame(clip.samples, k, cfg);
    // Time-domain energy of the windowed frame, recomputed directly.
    double time_energy = 0.0;
    {
      const int n = cfg.frame_len;
      const int pad = n / 2;
      const int64_t len = static_cast<int64_t>(clip.samples.size());
      for (int i = 0; i < n; ++i) {
        int64_t t = static_cast<int64_t>(k) * cfg.hop - pad + i;
        if (t < 0) t = -t;
        if (t >= len) t = 2 * (len - 1) - t;
        const double v =
            std::sin(M_PI * i / n) * clip.samples[static_cast<size_t>(t)];
        time_energy += v * v;
      }
    }
    // One-sided spectrum with Hermitian double counting (bins 0 and N/2
    // appear once, everything between twice).
    double freq_energy = std::norm(spec.at(0, k)) + std::norm(spec.at(256, k));
    for (int f = 1; f < 256; ++f) freq_energy += 2.0 * std::norm(spec.at(f, k));
    freq_energy /= cfg.frame_len;

    CHECK(std::abs(freq_energy - time_energy) <=
          1e-9 * std::max(1.0, time_energy));
    // And the library frame agrees with the oracle frame it was checked by.
    for (int f = 0; f < spec.bins; ++f) {
      CHECK(std::abs(spec.at(f, k) - frame[static_cast<size_t>(f)]) <= 1e-9);
    }
  }
}

TEST_CASE("dsp error paths") {
  AudioClip empty;
  try {
    stft(empty, StftConfig{});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptySignal);
  }

  StftConfig bad;
  bad.hop = 100;  // does not divide 512
  try {
    validate_config(bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
  }

  Spectrogram wrong;
  wrong.bins = 100;
  wrong.frames = 2;
  wrong.num_samples = 128;
  wrong.config = StftConfig{};
  wrong.data.assign(200, {0.0, 0.0});
  try {
    istft(wrong);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShapeMismatch);
  }
}
