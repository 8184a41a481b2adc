// src/dsp.cc

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

#include "dsp.h"

#include <cmath>

#include "error.h"
#include "fft.h"

namespace mixenh {

void validate_config(const StftConfig& cfg) {
  if (cfg.frame_len <= 0 || cfg.hop <= 0 || cfg.frame_len % cfg.hop != 0) {
    throw Error(ErrorCode::kConfigError,
                "stft: hop must divide frame_len (frame_len=" +
                    std::to_string(cfg.frame_len) +
                    ", hop=" + std::to_string(cfg.hop) + ")");
  }
  if ((cfg.frame_len & (cfg.frame_len - 1)) != 0) {
    throw Error(ErrorCode::kConfigError,
                "stft: frame_len must be a power of two");
  }
}

namespace {

// Reflect padding with repeated bounce, so pad widths larger than the signal
// are well defined (needed for clips shorter than frame_len/2).
std::vector<double> reflect_pad(const std::vector<double>& x, int pad) {
  const int64_t len = static_cast<int64_t>(x.size());
  std::vector<double> out(static_cast<size_t>(len + 2 * pad));
  if (len == 1) {
    std::fill(out.begin(), out.end(), x[0]);
    return out;
  }
  const int64_t period = 2 * (len - 1);
  for (int64_t j = 0; j < static_cast<int64_t>(out.size()); ++j) {
    int64_t v = j - pad;
    int64_t m = ((v % period) + period) % period;
    if (m >= len) m = period - m;
    out[static_cast<size_t>(j)] = x[static_cast<size_t>(m)];
  }
  return out;
}

}  // namespace

std::vector<double> sqrt_hann_window(int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double h = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / n));
    w[static_cast<size_t>(i)] = std::sqrt(h);
  }
  return w;
}

Spectrogram stft(const AudioClip& clip, const StftConfig& cfg) {
  validate_config(cfg);
  const int64_t len = static_cast<int64_t>(clip.samples.size());
  if (len < 1) {
    throw Error(ErrorCode::kEmptySignal, "stft: empty signal");
  }
  const int frame = cfg.frame_len;
  const int hop = cfg.hop;
  const int pad = frame / 2;
  const int bins = frame / 2 + 1;
  const int num_frames = static_cast<int>(1 + len / hop);

  std::vector<double> padded = reflect_pad(clip.samples, pad);
  std::vector<double> window = sqrt_hann_window(frame);

  Spectrogram spec;
  spec.bins = bins;
  spec.frames = num_frames;
  spec.config = cfg;
  spec.num_samples = len;
  spec.data.resize(static_cast<size_t>(bins) * num_frames);

  std::vector<double> buf(static_cast<size_t>(frame));
  for (int k = 0; k < num_frames; ++k) {
    const double* src = padded.data() + static_cast<size_t>(k) * hop;
    for (int i = 0; i < frame; ++i) buf[static_cast<size_t>(i)] = src[i] * window[static_cast<size_t>(i)];
    std::vector<std::complex<double>> half = rfft(buf);
    for (int f = 0; f < bins; ++f) spec.at(f, k) = half[static_cast<size_t>(f)];
  }
  return spec;
}

AudioClip istft(const Spectrogram& spec) {
  validate_config(spec.config);
  const int frame = spec.config.frame_len;
  const int hop = spec.config.hop;
  const int pad = frame / 2;
  const int bins = frame / 2 + 1;
  if (spec.bins != bins) {
    throw Error(ErrorCode::kShapeMismatch,
                "istft: spectrogram has " + std::to_string(spec.bins) +
                    " bins, config implies " + std::to_string(bins));
  }
  if (spec.num_samples < 1 ||
      spec.frames != static_cast<int>(1 + spec.num_samples / hop)) {
    throw Error(ErrorCode::kShapeMismatch,
                "istft: frame count inconsistent with recorded length");
  }

  const int64_t len = spec.num_samples;
  const size_t padded_len = static_cast<size_t>(len + 2 * pad);
  std::vector<double> acc(padded_len, 0.0);
  std::vector<double> wsum(padded_len, 0.0);
  std::vector<double> window = sqrt_hann_window(frame);

  std::vector<std::complex<double>> half(static_cast<size_t>(bins));
  for (int k = 0; k < spec.frames; ++k) {
    for (int f = 0; f < bins; ++f) half[static_cast<size_t>(f)] = spec.at(f, k);
    std::vector<double> frame_samples = irfft(half, frame);
    const size_t off = static_cast<size_t>(k) * hop;
    for (int i = 0; i < frame; ++i) {
      acc[off + i] += frame_samples[static_cast<size_t>(i)] * window[static_cast<size_t>(i)];
      wsum[off + i] += window[static_cast<size_t>(i)] * window[static_cast<size_t>(i)];
    }
  }

  AudioClip out;
  out.sample_rate = kSampleRate;
  out.samples.resize(static_cast<size_t>(len));
  for (int64_t i = 0; i < len; ++i) {
    const size_t j = static_cast<size_t>(i + pad);
    out.samples[static_cast<size_t>(i)] = wsum[j] > 1e-12 ? acc[j] / wsum[j] : 0.0;
  }
  return out;
}

Components components(const Spectrogram& spec) {
  Components c;
  c.re = Tensor({spec.bins, spec.frames});
  c.im = Tensor({spec.bins, spec.frames});
  c.mag = Tensor({spec.bins, spec.frames});
  for (size_t i = 0; i < spec.data.size(); ++i) {
    const std::complex<double>& z = spec.data[i];
    c.re.data[i] = z.real();
    c.im.data[i] = z.imag();
    c.mag.data[i] = std::abs(z);
  }
  return c;
}

}  // namespace mixenh
