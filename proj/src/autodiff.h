// src/autodiff.h

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

#ifndef MIXENH_SRC_AUTODIFF_H_
#define MIXENH_SRC_AUTODIFF_H_

#include <functional>
#include <memory>
#include <vector>

#include "mixit-loss.h"
#include "tensor.h"

namespace mixenh {

// Handle into a Tape.
struct ValueRef {
  int id = -1;
};

// Eager reverse-mode tape over Tensor-valued nodes. Every op computes its
// value at insertion time and records a closure that scatters the output
// gradient back to its inputs; insertion order therefore is a topological
// order and backward() is a single reverse sweep. Tensors hold doubles
// throughout so finite-difference checks can be tight.
//
// Every op validates its result with all_finite and throws
// NonFiniteActivation otherwise.
class Tape {
 public:
  Tape() = default;
  // Backward closures capture `this`; the tape must stay put.
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  ValueRef leaf(const Tensor& value, bool requires_grad);
  ValueRef constant(const Tensor& value) { return leaf(value, false); }

  const Tensor& value(ValueRef ref) const;
  // Zero tensor (allocated on demand) if the node was never reached by
  // backward().
  const Tensor& grad(ValueRef ref);

  // 3x3 (freq x time) convolution, zero padding 1 in time, and in frequency
  // such that F_out = F / stride_f. x is Cin x F x K, w is Cout x Cin x 3 x 3,
  // b is Cout. stride_f is 1 or 2 (frequency only; time stride is always 1).
  ValueRef conv2d(ValueRef x, ValueRef w, ValueRef b, int stride_f);

  // Per-channel temporal convolution with kernel 3 and the given dilation,
  // zero padded to keep K. w is C x 3, b is C.
  ValueRef depthwise_time(ValueRef x, ValueRef w, ValueRef b, int dilation);

  // 1x1 convolution across channels. w is Cout x Cin, b is Cout.
  ValueRef pointwise(ValueRef x, ValueRef w, ValueRef b);

  ValueRef elu(ValueRef x);

  // Per-channel normalization over all F x K positions with learned scale and
  // shift (gain, bias are C vectors).
  ValueRef channel_norm(ValueRef x, ValueRef gain, ValueRef bias);

  // Nearest-neighbour doubling of the frequency axis.
  ValueRef upsample_freq2(ValueRef x);

  ValueRef concat_channels(ValueRef a, ValueRef b);
  ValueRef add(ValueRef a, ValueRef b);
  ValueRef scale(ValueRef x, double c);

  // Keeps frequency rows [f0, f0 + len).
  ValueRef slice_freq(ValueRef x, int f0, int len);

  // Zero-pads the frequency axis up to f_total rows (original rows first).
  ValueRef pad_freq(ValueRef x, int f_total);

  // Gathers the listed channels into a new leading dimension.
  ValueRef select_channels(ValueRef x, const std::vector<int>& channels);

  // The three-term constrained objective as a scalar node. Assignment
  // matrices are chosen from the current estimate values at insertion time
  // (see mixit-loss.h); gradients flow only through the selected matrices.
  // Passing `forced` pins all three terms to that assignment instead of
  // minimizing (used for supervised regression). The breakdown of the chosen
  // assignments and term values is written to *breakdown when non-null.
  ValueRef csm_objective(ValueRef est_re, ValueRef est_im, const Tensor& ref_re,
                         const Tensor& ref_im, const Tensor& ref_mag,
                         MinMode mode, LossBreakdown* breakdown,
                         const MixingMatrix* forced = nullptr);

  // Arithmetic mean of scalar nodes.
  ValueRef mean_scalars(const std::vector<ValueRef>& xs);

  // Reverse sweep from a scalar root (shape {1}).
  void backward(ValueRef root);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // sized lazily on first accumulation
    bool needs_grad = false;
    std::function<void()> backprop;  // empty for leaves
  };

  Node& node(ValueRef ref) { return *nodes_[static_cast<size_t>(ref.id)]; }
  const Node& node(ValueRef ref) const {
    return *nodes_[static_cast<size_t>(ref.id)];
  }
  ValueRef emplace(Tensor value, bool needs_grad);
  // Gradient buffer of `ref`, allocated as zeros on first use.
  Tensor& grad_buf(ValueRef ref);
  bool has_grad(ValueRef ref) const;

  std::vector<std::unique_ptr<Node>> nodes_;
};

}  // namespace mixenh

#endif  // MIXENH_SRC_AUTODIFF_H_
