// src/dsp.h

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

#ifndef MIXENH_SRC_DSP_H_
#define MIXENH_SRC_DSP_H_

#include <complex>
#include <vector>

#include "audio-io.h"
#include "tensor.h"

namespace mixenh {

// Analysis/synthesis configuration. The window is a square-root Hann of
// frame_len samples on both sides, and fft_len == frame_len. hop must divide
// frame_len so the squared window satisfies constant overlap-add.
struct StftConfig {
  int frame_len = 512;
  int hop = 128;

  bool operator==(const StftConfig&) const = default;
};

// Complex F x K time-frequency array, F = frame_len/2 + 1, time frames in the
// contiguous dimension. num_samples records the analyzed clip length so the
// inverse transform can restore it exactly.
struct Spectrogram {
  int bins = 0;    // F
  int frames = 0;  // K
  StftConfig config;
  int64_t num_samples = 0;
  std::vector<std::complex<double>> data;  // [f * frames + k]

  std::complex<double>& at(int f, int k) {
    return data[static_cast<size_t>(f) * frames + k];
  }
  std::complex<double> at(int f, int k) const {
    return data[static_cast<size_t>(f) * frames + k];
  }
};

// Throws ConfigError unless hop divides frame_len and frame_len is a power
// of two.
void validate_config(const StftConfig& cfg);

// Periodic Hann raised to the 1/2 power.
std::vector<double> sqrt_hann_window(int n);

// Centered analysis: the signal is reflect-padded by frame_len/2 on each side
// and framed at hop intervals, K = 1 + floor(len / hop). One-sided spectra.
Spectrogram stft(const AudioClip& clip, const StftConfig& cfg);

// Weighted overlap-add synthesis with the same square-root Hann window and
// per-sample window-power normalization; returns exactly the original length.
AudioClip istft(const Spectrogram& spec);

// Real part, imaginary part and magnitude as three real F x K tensors.
struct Components {
  Tensor re, im, mag;
};
Components components(const Spectrogram& spec);

}  // namespace mixenh

#endif  // MIXENH_SRC_DSP_H_
