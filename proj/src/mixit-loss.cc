// src/mixit-loss.cc

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

#include "mixit-loss.h"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "error.h"

namespace mixenh {
namespace {

MixingMatrix make_matrix(int m, std::initializer_list<int> row0,
                         std::initializer_list<int> row1) {
  MixingMatrix a;
  a.m = m;
  int c = 0;
  for (int v : row0) a.e[0][static_cast<size_t>(c++)] = v;
  c = 0;
  for (int v : row1) a.e[1][static_cast<size_t>(c++)] = v;
  return a;
}

void check_triplet_shapes(const Tensor& refs, const Tensor& ests) {
  if (refs.shape.size() != 3 || ests.shape.size() != 3 || refs.shape[0] != 2 ||
      refs.shape[1] != ests.shape[1] || refs.shape[2] != ests.shape[2]) {
    throw Error(ErrorCode::kShapeMismatch,
                "mixit loss: refs must be 2xFxK and ests MxFxK with matching "
                "F and K");
  }
}

}  // namespace

std::vector<MixingMatrix> enumerate_allowed(int m) {
  if (m == 2) {
    return {make_matrix(2, {1, 0}, {0, 1})};
  }
  if (m == 3) {
    return {
        make_matrix(3, {1, 0, 0}, {0, 1, 1}),  // speech from output 1
        make_matrix(3, {1, 1, 0}, {0, 0, 1}),  // speech from outputs 1+2
        make_matrix(3, {1, 0, 1}, {0, 1, 0}),  // speech from outputs 1+3
    };
  }
  throw Error(ErrorCode::kUnsupportedOutputs,
              "mixit loss: M must be 2 or 3, got " + std::to_string(m));
}

double l1_term(const Tensor& refs, const Tensor& ests, const MixingMatrix& a) {
  check_triplet_shapes(refs, ests);
  if (a.m != ests.shape[0]) {
    throw Error(ErrorCode::kShapeMismatch,
                "mixit loss: mixing matrix has " + std::to_string(a.m) +
                    " columns, estimates have " +
                    std::to_string(ests.shape[0]) + " channels");
  }
  const int m = ests.shape[0];
  const int f = refs.shape[1];
  const int k = refs.shape[2];
  const size_t plane = static_cast<size_t>(f) * static_cast<size_t>(k);

  double acc = 0.0;
  for (int row = 0; row < 2; ++row) {
    const double* ref = refs.data.data() + static_cast<size_t>(row) * plane;
    for (size_t i = 0; i < plane; ++i) {
      double mixed = 0.0;
      for (int col = 0; col < m; ++col) {
        if (a.at(row, col)) {
          mixed += ests.data[static_cast<size_t>(col) * plane + i];
        }
      }
      acc += std::abs(ref[i] - mixed);
    }
  }
  return acc / (2.0 * static_cast<double>(plane));
}

LossBreakdown csm_loss_components(const Tensor& ref_re, const Tensor& ref_im,
                                  const Tensor& ref_mag, const Tensor& est_re,
                                  const Tensor& est_im, const Tensor& est_mag,
                                  MinMode mode, const MixingMatrix* forced) {
  check_triplet_shapes(ref_re, est_re);
  if (!ref_im.same_shape(ref_re) || !ref_mag.same_shape(ref_re) ||
      !est_im.same_shape(est_re) || !est_mag.same_shape(est_re)) {
    throw Error(ErrorCode::kShapeMismatch,
                "mixit loss: component tensors disagree in shape");
  }
  const std::vector<MixingMatrix> allowed = enumerate_allowed(est_re.shape[0]);

  LossBreakdown out;
  if (forced != nullptr) {
    out.re_term = l1_term(ref_re, est_re, *forced);
    out.im_term = l1_term(ref_im, est_im, *forced);
    out.mag_term = l1_term(ref_mag, est_mag, *forced);
    out.a_re = out.a_im = out.a_mag = *forced;
  } else if (mode == MinMode::kPerTerm) {
    struct TermPick {
      double value;
      MixingMatrix a;
    };
    auto minimize = [&](const Tensor& refs, const Tensor& ests) {
      TermPick best{l1_term(refs, ests, allowed[0]), allowed[0]};
      for (size_t i = 1; i < allowed.size(); ++i) {
        const double v = l1_term(refs, ests, allowed[i]);
        if (v < best.value) best = {v, allowed[i]};
      }
      return best;
    };
    const TermPick re = minimize(ref_re, est_re);
    const TermPick im = minimize(ref_im, est_im);
    const TermPick mag = minimize(ref_mag, est_mag);
    out.re_term = re.value;
    out.im_term = im.value;
    out.mag_term = mag.value;
    out.a_re = re.a;
    out.a_im = im.a;
    out.a_mag = mag.a;
  } else {
    double best = -1.0;
    for (const MixingMatrix& a : allowed) {
      const double re = l1_term(ref_re, est_re, a);
      const double im = l1_term(ref_im, est_im, a);
      const double mag = l1_term(ref_mag, est_mag, a);
      const double sum = re + im + mag;
      if (best < 0.0 || sum < best) {
        best = sum;
        out.re_term = re;
        out.im_term = im;
        out.mag_term = mag;
        out.a_re = out.a_im = out.a_mag = a;
      }
    }
  }
  out.total = out.re_term + out.im_term + out.mag_term;
  return out;
}

RefStack stack_refs(const Spectrogram& ref_speech,
                    const Spectrogram& ref_noise) {
  if (ref_speech.bins != ref_noise.bins ||
      ref_speech.frames != ref_noise.frames) {
    throw Error(ErrorCode::kShapeMismatch,
                "mixit loss: reference spectrograms disagree in shape");
  }
  const int f = ref_speech.bins;
  const int k = ref_speech.frames;
  RefStack out{Tensor({2, f, k}), Tensor({2, f, k}), Tensor({2, f, k})};
  const Spectrogram* refs[2] = {&ref_speech, &ref_noise};
  for (int row = 0; row < 2; ++row) {
    const Components c = components(*refs[row]);
    const size_t plane = c.re.data.size();
    std::copy(c.re.data.begin(), c.re.data.end(),
              out.re.data.begin() + static_cast<int64_t>(row * plane));
    std::copy(c.im.data.begin(), c.im.data.end(),
              out.im.data.begin() + static_cast<int64_t>(row * plane));
    std::copy(c.mag.data.begin(), c.mag.data.end(),
              out.mag.data.begin() + static_cast<int64_t>(row * plane));
  }
  return out;
}

LossBreakdown csm_loss(const Spectrogram& ref_speech,
                       const Spectrogram& ref_noise,
                       const SourceEstimates& est, MinMode mode,
                       const MixingMatrix* forced) {
  if (est.specs.empty()) {
    throw Error(ErrorCode::kUnsupportedOutputs, "mixit loss: no estimates");
  }
  const RefStack refs = stack_refs(ref_speech, ref_noise);
  const int m = static_cast<int>(est.specs.size());
  const int f = ref_speech.bins;
  const int k = ref_speech.frames;
  for (const Spectrogram& s : est.specs) {
    if (s.bins != f || s.frames != k) {
      throw Error(ErrorCode::kShapeMismatch,
                  "mixit loss: estimate shape differs from references");
    }
  }

  Tensor est_re({m, f, k}), est_im({m, f, k}), est_mag({m, f, k});
  for (int ch = 0; ch < m; ++ch) {
    const Components c = components(est.specs[static_cast<size_t>(ch)]);
    const size_t plane = c.re.data.size();
    std::copy(c.re.data.begin(), c.re.data.end(),
              est_re.data.begin() + static_cast<int64_t>(ch * plane));
    std::copy(c.im.data.begin(), c.im.data.end(),
              est_im.data.begin() + static_cast<int64_t>(ch * plane));
    std::copy(c.mag.data.begin(), c.mag.data.end(),
              est_mag.data.begin() + static_cast<int64_t>(ch * plane));
  }

  return csm_loss_components(refs.re, refs.im, refs.mag, est_re, est_im,
                             est_mag, mode, forced);
}

}  // namespace mixenh
