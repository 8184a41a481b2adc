// src/trainer.h

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

#ifndef MIXENH_SRC_TRAINER_H_
#define MIXENH_SRC_TRAINER_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "audio-io.h"
#include "dsp.h"
#include "mixer.h"
#include "mixit-loss.h"
#include "model.h"

namespace mixenh {

struct TrainConfig {
  double lr = 1e-3;
  int batch_size = 8;
  int epochs = 100;
  int steps_per_epoch = 50;
  int plateau_patience = 3;    // epochs without val-loss improvement
  double lr_factor = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;
  MinMode loss_mode = MinMode::kPerTerm;
  // Regress output 1 onto the clean reference directly (fixed assignment)
  // instead of minimizing over assignments.
  bool supervised = false;
  int val_examples = 16;

  bool operator==(const TrainConfig&) const = default;
};

// Throws ConfigError on out-of-range fields.
void validate_config(const TrainConfig& cfg);

// Gradients are clipped when their global L2 norm across all parameter
// arrays exceeds this (a rare-blowup guard, reported on stderr).
inline constexpr double kGradClipNorm = 5.0;

double global_grad_norm(const std::map<std::string, Tensor>& grads);

// Scales all gradients so the global norm is at most max_norm; returns true
// when scaling happened.
bool clip_gradients(std::map<std::string, Tensor>* grads, double max_norm);

// Bias-corrected Adam moments, shared keys with the parameters they update.
struct AdamState {
  std::map<std::string, Tensor> m, v;
  int64_t step = 0;
};

// One Adam update in place:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
//   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
// Throws NonFiniteGradient on NaN/Inf gradients, ShapeMismatch when the
// gradient keys do not match the parameters.
void adam_step(Parameters* params, const std::map<std::string, Tensor>& grads,
               AdamState* state, double lr, const TrainConfig& cfg);

// Halves the learning rate after `patience` consecutive epochs without a
// strict validation-loss improvement; the stall counter resets after each
// halving (and on every improvement).
class PlateauScheduler {
 public:
  PlateauScheduler(double lr0, int patience, double factor)
      : lr_(lr0), patience_(patience), factor_(factor) {}

  // Feeds one epoch's validation loss; returns true when the rate halved.
  bool observe(double val_loss);
  double lr() const { return lr_; }

 private:
  double lr_;
  int patience_;
  double factor_;
  double best_ = 0.0;
  bool seen_any_ = false;
  int stall_ = 0;
};

// Mean SNR improvement over clean-target validation examples: enhance via
// forward + inverse STFT of output 1, then SNR(clean, enhanced) -
// SNR(clean, input). Throws WrongKind if any example lacks a clean target.
double validate_snri(const Parameters& params, const ModelConfig& mcfg,
                     const StftConfig& stft,
                     const std::vector<MixExample>& val_set);

struct TrainResult {
  std::filesystem::path best_checkpoint;
  std::filesystem::path metrics_path;
  int best_epoch = 0;  // 0 = initial parameters (epochs == 0)
  double best_snri_db = 0.0;
};

// Full training loop: per epoch, steps_per_epoch batches are sampled and
// optimized, validation loss and SNRi are computed on a fixed seeded set,
// the learning rate follows the plateau rule, a checkpoint and a JSON-lines
// metrics record {epoch, train_loss, val_loss, val_snri_db, lr} are written,
// and the checkpoint with the highest validation SNRi (earliest on ties) is
// kept as best.ckpt. Deterministic in the seeds: two runs yield
// byte-identical metrics logs. Throws DivergedLoss (after dumping state)
// when the train loss goes non-finite. step_losses, when given, receives
// every step's batch-mean loss in order.
TrainResult train(const Manifest& train_manifest, const Manifest& val_manifest,
                  const ModelConfig& mcfg, const SamplerConfig& scfg,
                  const TrainConfig& tcfg, const StftConfig& stft,
                  const std::filesystem::path& out_dir,
                  std::vector<double>* step_losses = nullptr);

}  // namespace mixenh

#endif  // MIXENH_SRC_TRAINER_H_
