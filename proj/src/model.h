// src/model.h

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

#ifndef MIXENH_SRC_MODEL_H_
#define MIXENH_SRC_MODEL_H_

#include <map>
#include <string>
#include <vector>

#include "autodiff.h"
#include "dsp.h"
#include "mixit-loss.h"
#include "tensor.h"

namespace mixenh {

// Small U-shaped complex-spectral-mapping network: strided 3x3 encoder with
// skip connections, a bottleneck of tcn_repeats x tcn_blocks dilated
// depthwise temporal blocks (dilation 2^x for block x), a nearest-upsample
// decoder with skip concatenation, and a linear head emitting interleaved
// (Re, Im) planes for num_outputs sources.
struct ModelConfig {
  int num_outputs = 3;    // M: speech channel plus noise channels
  int base_channels = 16;
  int enc_depth = 3;      // frequency halvings
  int tcn_repeats = 2;    // R
  int tcn_blocks = 7;     // X, dilations 1, 2, ..., 2^(X-1)

  bool operator==(const ModelConfig&) const = default;
};

// Throws ConfigError unless M >= 2, enc_depth >= 1, tcn counts >= 1,
// base_channels >= 1.
void validate_config(const ModelConfig& cfg);

// Named parameter arrays. std::map gives the deterministic iteration order
// the checkpoint format and optimizer state rely on.
struct Parameters {
  std::map<std::string, Tensor> values;

  int64_t total_count() const;
};

// Uniform init on [-sqrt(3)/sqrt(fan_in), +sqrt(3)/sqrt(fan_in)] (variance
// 1/fan_in) for weights, zeros for biases, ones for normalization gains.
// Deterministic in seed.
Parameters init_params(const ModelConfig& cfg, uint64_t seed);

// One differentiable evaluation: construct, run forward once, optionally
// attach the training objective, then backprop. The tape lives as long as
// the graph, so gradients can be read after backward().
class ModelGraph {
 public:
  ModelGraph(const ModelConfig& cfg, const Parameters& params);

  // Input must have 257 bins and at least 2^(tcn_blocks - 1) + 1 frames.
  // Throws ShapeMismatch otherwise; NonFiniteActivation on NaN/Inf anywhere.
  SourceEstimates forward(const Spectrogram& mixture);

  // Attaches the constrained three-term objective for this example. When
  // `forced` is non-null the assignment is pinned (supervised regression)
  // instead of minimized. Requires forward() first (MissingForwardContext).
  LossBreakdown add_loss(const Spectrogram& ref_speech,
                         const Spectrogram& ref_noise, MinMode mode,
                         const MixingMatrix* forced = nullptr);

  // Backprop of scale * loss. Requires add_loss() first.
  void backward(double scale = 1.0);

  // Adds this graph's parameter gradients into `acc` (zero-initialized
  // entries are created on demand). Throws NonFiniteGradient on NaN/Inf.
  void accumulate_grads(std::map<std::string, Tensor>* acc);

 private:
  ModelConfig cfg_;
  Tape tape_;
  std::map<std::string, ValueRef> leaves_;
  ValueRef est_re_{}, est_im_{}, loss_{};
  bool forward_done_ = false;
  bool loss_done_ = false;
  bool backward_done_ = false;
  // Shape metadata of the analyzed mixture, echoed into the estimates.
  StftConfig in_config_;
  int64_t in_num_samples_ = 0;
  int bins_ = 0, frames_ = 0;
};

// Convenience inference wrapper (builds a throwaway graph).
SourceEstimates run_forward(const Parameters& params, const ModelConfig& cfg,
                            const Spectrogram& mixture);

}  // namespace mixenh

#endif  // MIXENH_SRC_MODEL_H_
