// src/postproc.h

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

#ifndef MIXENH_SRC_POSTPROC_H_
#define MIXENH_SRC_POSTPROC_H_

#include "audio-io.h"

namespace mixenh {

struct RemixConfig {
  double beta_db = 0.0;
};

// Speaker reinforcement: z = enhanced + g * noisy with
// g = sqrt(power(enhanced) / power(noisy)) * 10^(-beta_db / 20), so the SNR
// between the enhanced signal and the added noisy term equals beta_db. No
// renormalization; clipping is handled at WAV write time.
AudioClip remix(const AudioClip& enhanced, const AudioClip& noisy,
                double beta_db);

// 10*log10(power(ref) / power(est - ref)), capped to [-100, +100] dB so an
// exact reconstruction stays finite.
double snr_db(const AudioClip& ref, const AudioClip& est);

}  // namespace mixenh

#endif  // MIXENH_SRC_POSTPROC_H_
