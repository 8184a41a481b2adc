// src/postproc.cc

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

#include "postproc.h"

#include <algorithm>
#include <cmath>

#include "error.h"
#include "mixer.h"

namespace mixenh {

namespace {
constexpr double kSnrCapDb = 100.0;
}  // namespace

AudioClip remix(const AudioClip& enhanced, const AudioClip& noisy,
                double beta_db) {
  if (!std::isfinite(beta_db)) {
    throw Error(ErrorCode::kConfigError, "remix: beta must be finite");
  }
  if (enhanced.samples.size() != noisy.samples.size()) {
    throw Error(ErrorCode::kShapeMismatch, "remix: length mismatch");
  }
  if (signal_power(enhanced) <= 0.0) {
    throw Error(ErrorCode::kSilentSignal, "remix: enhanced signal is silent");
  }
  if (signal_power(noisy) <= 0.0) {
    throw Error(ErrorCode::kSilentSignal, "remix: noisy signal is silent");
  }
  const double g = snr_gain(enhanced, noisy, beta_db);
  AudioClip out;
  out.sample_rate = enhanced.sample_rate;
  out.samples.resize(enhanced.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = enhanced.samples[i] + g * noisy.samples[i];
  }
  return out;
}

double snr_db(const AudioClip& ref, const AudioClip& est) {
  if (ref.samples.size() != est.samples.size()) {
    throw Error(ErrorCode::kShapeMismatch, "snr_db: length mismatch");
  }
  const double ref_power = signal_power(ref);
  if (ref_power <= 0.0) {
    throw Error(ErrorCode::kSilentSignal, "snr_db: reference is silent");
  }
  double err_power = 0.0;
  for (size_t i = 0; i < ref.samples.size(); ++i) {
    const double e = est.samples[i] - ref.samples[i];
    err_power += e * e;
  }
  err_power /= static_cast<double>(ref.samples.size());
  if (err_power == 0.0) return kSnrCapDb;
  return std::clamp(10.0 * std::log10(ref_power / err_power), -kSnrCapDb,
                    kSnrCapDb);
}

}  // namespace mixenh
