// src/model.cc

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

#include "model.h"

#include <cmath>
#include <string>
#include <utility>

#include "error.h"
#include "rng.h"

namespace mixenh {
namespace {

constexpr int kExpectedBins = 257;  // 512-point analysis, one-sided

int enc_out_channels(const ModelConfig& cfg, int level) {
  return cfg.base_channels << level;
}

int enc_in_channels(const ModelConfig& cfg, int level) {
  return level == 0 ? 2 : enc_out_channels(cfg, level - 1);
}

// Channel width of the decoder output at `level`; level == enc_depth refers
// to the bottleneck input of the decoder.
int dec_channels(const ModelConfig& cfg, int level) {
  if (level == cfg.enc_depth) return enc_out_channels(cfg, cfg.enc_depth - 1);
  return level == 0 ? cfg.base_channels : enc_out_channels(cfg, level - 1);
}

std::string enc_name(int level, const char* leafname) {
  return "enc" + std::to_string(level) + "." + leafname;
}
std::string dec_name(int level, const char* leafname) {
  return "dec" + std::to_string(level) + "." + leafname;
}
std::string tcn_name(int rep, int block, const char* leafname) {
  return "tcn" + std::to_string(rep) + "." + std::to_string(block) + "." +
         leafname;
}

Tensor uniform_weights(std::vector<int> shape, int fan_in, RandomGen* rng) {
  Tensor t(std::move(shape));
  const double bound = std::sqrt(3.0 / fan_in);
  for (double& v : t.data) v = rng->uniform(-bound, bound);
  return t;
}

Tensor filled(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = value;
  return t;
}

// Smallest multiple of 2^depth that holds `bins` rows.
int padded_bins(int bins, int depth) {
  const int unit = 1 << depth;
  return ((bins + unit - 1) / unit) * unit;
}

}  // namespace

void validate_config(const ModelConfig& cfg) {
  if (cfg.num_outputs < 2 || cfg.base_channels < 1 || cfg.enc_depth < 1 ||
      cfg.tcn_repeats < 1 || cfg.tcn_blocks < 1) {
    throw Error(ErrorCode::kConfigError,
                "model config: need num_outputs >= 2, base_channels >= 1, "
                "enc_depth >= 1, tcn_repeats >= 1, tcn_blocks >= 1");
  }
}

int64_t Parameters::total_count() const {
  int64_t n = 0;
  for (const auto& [name, tensor] : values) n += tensor.numel();
  return n;
}

Parameters init_params(const ModelConfig& cfg, uint64_t seed) {
  validate_config(cfg);
  RandomGen rng(seed);
  Parameters p;
  auto put = [&p](const std::string& name, Tensor t) {
    p.values.emplace(name, std::move(t));
  };

  for (int l = 0; l < cfg.enc_depth; ++l) {
    const int cin = enc_in_channels(cfg, l);
    const int cout = enc_out_channels(cfg, l);
    put(enc_name(l, "conv.w"), uniform_weights({cout, cin, 3, 3}, cin * 9, &rng));
    put(enc_name(l, "conv.b"), filled({cout}, 0.0));
    put(enc_name(l, "norm.gain"), filled({cout}, 1.0));
    put(enc_name(l, "norm.bias"), filled({cout}, 0.0));
  }

  const int cb = enc_out_channels(cfg, cfg.enc_depth - 1);
  for (int r = 0; r < cfg.tcn_repeats; ++r) {
    for (int x = 0; x < cfg.tcn_blocks; ++x) {
      put(tcn_name(r, x, "dw.w"), uniform_weights({cb, 3}, 3, &rng));
      put(tcn_name(r, x, "dw.b"), filled({cb}, 0.0));
      put(tcn_name(r, x, "pw.w"), uniform_weights({cb, cb}, cb, &rng));
      put(tcn_name(r, x, "pw.b"), filled({cb}, 0.0));
      put(tcn_name(r, x, "norm.gain"), filled({cb}, 1.0));
      put(tcn_name(r, x, "norm.bias"), filled({cb}, 0.0));
    }
  }

  for (int l = cfg.enc_depth - 1; l >= 0; --l) {
    const int cin = dec_channels(cfg, l + 1) + enc_in_channels(cfg, l);
    const int cout = dec_channels(cfg, l);
    put(dec_name(l, "conv.w"), uniform_weights({cout, cin, 3, 3}, cin * 9, &rng));
    put(dec_name(l, "conv.b"), filled({cout}, 0.0));
    put(dec_name(l, "norm.gain"), filled({cout}, 1.0));
    put(dec_name(l, "norm.bias"), filled({cout}, 0.0));
  }

  const int head_out = 2 * cfg.num_outputs;
  put("head.w", uniform_weights({head_out, cfg.base_channels, 3, 3},
                                cfg.base_channels * 9, &rng));
  put("head.b", filled({head_out}, 0.0));
  return p;
}

ModelGraph::ModelGraph(const ModelConfig& cfg, const Parameters& params)
    : cfg_(cfg) {
  validate_config(cfg);
  for (const auto& [name, tensor] : params.values) {
    leaves_.emplace(name, tape_.leaf(tensor, /*requires_grad=*/true));
  }
}

SourceEstimates ModelGraph::forward(const Spectrogram& mixture) {
  if (forward_done_) {
    throw Error(ErrorCode::kInvalidArgument,
                "model graph: forward may only run once per graph");
  }
  if (mixture.bins != kExpectedBins) {
    throw Error(ErrorCode::kShapeMismatch,
                "model: expected " + std::to_string(kExpectedBins) +
                    " frequency bins, got " + std::to_string(mixture.bins));
  }
  const int min_frames = (1 << (cfg_.tcn_blocks - 1)) + 1;
  if (mixture.frames < min_frames) {
    throw Error(ErrorCode::kShapeMismatch,
                "model: need at least " + std::to_string(min_frames) +
                    " frames for the dilated bottleneck, got " +
                    std::to_string(mixture.frames));
  }
  auto leaf = [this](const std::string& name) {
    auto it = leaves_.find(name);
    if (it == leaves_.end()) {
      throw Error(ErrorCode::kConfigError,
                  "model: parameters lack entry " + name);
    }
    return it->second;
  };

  bins_ = mixture.bins;
  frames_ = mixture.frames;
  in_config_ = mixture.config;
  in_num_samples_ = mixture.num_samples;
  const int fpad = padded_bins(bins_, cfg_.enc_depth);
  const int k = frames_;

  // Input scale: the net sees Y/c and its output is rescaled by c, so the
  // mapping is equivariant to input gain. c is a constant of the graph.
  double power = 0.0;
  for (const std::complex<double>& z : mixture.data) power += std::norm(z);
  const double c = std::max(
      std::sqrt(power / static_cast<double>(mixture.data.size())), 1e-8);

  Tensor input({2, fpad, k});
  for (int f = 0; f < bins_; ++f) {
    for (int kk = 0; kk < k; ++kk) {
      const std::complex<double> z = mixture.at(f, kk);
      input.at3(0, f, kk) = z.real() / c;
      input.at3(1, f, kk) = z.imag() / c;
    }
  }

  ValueRef x = tape_.constant(input);
  std::vector<ValueRef> skips;
  for (int l = 0; l < cfg_.enc_depth; ++l) {
    skips.push_back(x);
    x = tape_.conv2d(x, leaf(enc_name(l, "conv.w")), leaf(enc_name(l, "conv.b")),
                     /*stride_f=*/2);
    x = tape_.elu(x);
    x = tape_.channel_norm(x, leaf(enc_name(l, "norm.gain")),
                           leaf(enc_name(l, "norm.bias")));
  }

  for (int r = 0; r < cfg_.tcn_repeats; ++r) {
    for (int b = 0; b < cfg_.tcn_blocks; ++b) {
      ValueRef h = tape_.depthwise_time(x, leaf(tcn_name(r, b, "dw.w")),
                                        leaf(tcn_name(r, b, "dw.b")), 1 << b);
      h = tape_.elu(h);
      h = tape_.pointwise(h, leaf(tcn_name(r, b, "pw.w")),
                          leaf(tcn_name(r, b, "pw.b")));
      h = tape_.channel_norm(h, leaf(tcn_name(r, b, "norm.gain")),
                             leaf(tcn_name(r, b, "norm.bias")));
      x = tape_.add(x, h);
    }
  }

  for (int l = cfg_.enc_depth - 1; l >= 0; --l) {
    x = tape_.upsample_freq2(x);
    x = tape_.concat_channels(x, skips[static_cast<size_t>(l)]);
    x = tape_.conv2d(x, leaf(dec_name(l, "conv.w")), leaf(dec_name(l, "conv.b")),
                     /*stride_f=*/1);
    x = tape_.elu(x);
    x = tape_.channel_norm(x, leaf(dec_name(l, "norm.gain")),
                           leaf(dec_name(l, "norm.bias")));
  }

  ValueRef head = tape_.conv2d(x, leaf("head.w"), leaf("head.b"), 1);
  head = tape_.scale(head, c);
  head = tape_.slice_freq(head, 0, bins_);

  std::vector<int> re_planes, im_planes;
  for (int ch = 0; ch < cfg_.num_outputs; ++ch) {
    re_planes.push_back(2 * ch);
    im_planes.push_back(2 * ch + 1);
  }
  est_re_ = tape_.select_channels(head, re_planes);
  est_im_ = tape_.select_channels(head, im_planes);
  forward_done_ = true;

  const Tensor& re = tape_.value(est_re_);
  const Tensor& im = tape_.value(est_im_);
  SourceEstimates out;
  out.specs.resize(static_cast<size_t>(cfg_.num_outputs));
  for (int ch = 0; ch < cfg_.num_outputs; ++ch) {
    Spectrogram& s = out.specs[static_cast<size_t>(ch)];
    s.bins = bins_;
    s.frames = frames_;
    s.config = in_config_;
    s.num_samples = in_num_samples_;
    s.data.resize(static_cast<size_t>(bins_) * static_cast<size_t>(frames_));
    for (int f = 0; f < bins_; ++f) {
      for (int kk = 0; kk < frames_; ++kk) {
        s.at(f, kk) = {re.at3(ch, f, kk), im.at3(ch, f, kk)};
      }
    }
  }
  return out;
}

LossBreakdown ModelGraph::add_loss(const Spectrogram& ref_speech,
                                   const Spectrogram& ref_noise, MinMode mode,
                                   const MixingMatrix* forced) {
  if (!forward_done_) {
    throw Error(ErrorCode::kMissingForwardContext,
                "model graph: add_loss requires a completed forward pass");
  }
  if (loss_done_) {
    throw Error(ErrorCode::kInvalidArgument,
                "model graph: loss already attached");
  }
  const RefStack refs = stack_refs(ref_speech, ref_noise);
  LossBreakdown bd;
  loss_ = tape_.csm_objective(est_re_, est_im_, refs.re, refs.im, refs.mag,
                              mode, &bd, forced);
  loss_done_ = true;
  return bd;
}

void ModelGraph::backward(double scale) {
  if (!loss_done_) {
    throw Error(ErrorCode::kMissingForwardContext,
                "model graph: backward requires an attached loss");
  }
  if (backward_done_) {
    throw Error(ErrorCode::kInvalidArgument,
                "model graph: backward may only run once per graph");
  }
  tape_.backward(tape_.scale(loss_, scale));
  backward_done_ = true;
}

void ModelGraph::accumulate_grads(std::map<std::string, Tensor>* acc) {
  if (!backward_done_) {
    throw Error(ErrorCode::kMissingForwardContext,
                "model graph: gradients are available only after backward");
  }
  for (const auto& [name, ref] : leaves_) {
    const Tensor& g = tape_.grad(ref);
    if (!all_finite(g)) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "model graph: non-finite gradient for " + name);
    }
    auto it = acc->find(name);
    if (it == acc->end()) {
      it = acc->emplace(name, Tensor(g.shape)).first;
    }
    for (size_t i = 0; i < g.data.size(); ++i) {
      it->second.data[i] += g.data[i];
    }
  }
}

SourceEstimates run_forward(const Parameters& params, const ModelConfig& cfg,
                            const Spectrogram& mixture) {
  ModelGraph graph(cfg, params);
  return graph.forward(mixture);
}

}  // namespace mixenh
