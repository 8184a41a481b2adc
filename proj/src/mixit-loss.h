// src/mixit-loss.h

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

#ifndef MIXENH_SRC_MIXIT_LOSS_H_
#define MIXENH_SRC_MIXIT_LOSS_H_

#include <array>
#include <vector>

#include "dsp.h"
#include "tensor.h"

namespace mixenh {

// Binary 2 x M assignment of model outputs to the two mixture references.
// Row 0 collects the outputs that reconstruct the speech reference, row 1
// the outputs that reconstruct the noise reference; each column sums to 1.
struct MixingMatrix {
  int m = 0;  // number of columns (model outputs), at most 3
  std::array<std::array<int, 3>, 2> e{};

  int at(int row, int col) const {
    return e[static_cast<size_t>(row)][static_cast<size_t>(col)];
  }
  bool operator==(const MixingMatrix&) const = default;
};

// The admissible assignments. Output 1 always reconstructs speech, alone or
// together with output 2 or output 3; the remaining outputs reconstruct the
// noise reference. M=2 admits only the identity assignment. Throws
// UnsupportedOutputs for M outside {2, 3}. The returned order is the
// tie-break order everywhere in this module.
std::vector<MixingMatrix> enumerate_allowed(int m);

// Mean absolute deviation between refs (2 x F x K) and A * ests (M x F x K),
// averaged over all 2*F*K entries.
double l1_term(const Tensor& refs, const Tensor& ests, const MixingMatrix& a);

// Eq-style three-term objective: either each term picks its own assignment
// (per_term) or one assignment minimizes the sum (joint).
enum class MinMode { kPerTerm, kJoint };

// M complex spectrograms; channel 0 is the designated denoised-speech output.
struct SourceEstimates {
  std::vector<Spectrogram> specs;
};

struct LossBreakdown {
  double total = 0.0;
  double re_term = 0.0;
  double im_term = 0.0;
  double mag_term = 0.0;
  // Winning assignment per term; all three coincide in joint mode.
  MixingMatrix a_re, a_im, a_mag;
};

// min over allowed A of L1(Re X, A Re S) + L1(Im X, A Im S) + L1(|X|, A |S|),
// with X the stacked (speech, noise) references and S the estimates. The
// magnitude term compares |X| against the sum of estimate magnitudes.
// A non-null `forced` pins all three terms to that assignment instead of
// minimizing (supervised regression).
LossBreakdown csm_loss(const Spectrogram& ref_speech,
                       const Spectrogram& ref_noise,
                       const SourceEstimates& est, MinMode mode,
                       const MixingMatrix* forced = nullptr);

// (speech, noise) reference components stacked into 2 x F x K tensors.
struct RefStack {
  Tensor re, im, mag;
};
RefStack stack_refs(const Spectrogram& ref_speech,
                    const Spectrogram& ref_noise);

// Same objective on pre-extracted components. Each ref tensor is 2 x F x K
// and each estimate tensor M x F x K.
LossBreakdown csm_loss_components(const Tensor& ref_re, const Tensor& ref_im,
                                  const Tensor& ref_mag, const Tensor& est_re,
                                  const Tensor& est_im, const Tensor& est_mag,
                                  MinMode mode,
                                  const MixingMatrix* forced = nullptr);

}  // namespace mixenh

#endif  // MIXENH_SRC_MIXIT_LOSS_H_
