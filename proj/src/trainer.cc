// src/trainer.cc

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

#include "trainer.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "checkpoint.h"
#include "config.h"
#include "error.h"
#include "postproc.h"
#include "rng.h"

namespace mixenh {
namespace {

// Seed-derivation tags (see rng.h); distinct streams for initialization and
// the validation draw so neither perturbs the training sampler.
enum : uint64_t { kTagInit = 0x1a17, kTagVal = 0x7a1 };

struct ValStats {
  double loss = 0.0;
  double snri_db = 0.0;
};

void check_clean_kind(const MixExample& ex) {
  if (ex.kind != ExampleKind::kCleanTarget) {
    throw Error(ErrorCode::kWrongKind,
                "validation: every example needs a clean reference");
  }
}

ValStats validation_stats(const Parameters& params, const ModelConfig& mcfg,
                          const StftConfig& stft_cfg,
                          const std::vector<MixExample>& val_set, MinMode mode,
                          const MixingMatrix* forced) {
  if (val_set.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "validation: empty set");
  }
  ValStats stats;
  for (const MixExample& ex : val_set) {
    check_clean_kind(ex);
    const Spectrogram mix = stft(ex.input, stft_cfg);
    const SourceEstimates est = run_forward(params, mcfg, mix);
    const Spectrogram ref_s = stft(ex.refs[0], stft_cfg);
    const Spectrogram ref_n = stft(ex.refs[1], stft_cfg);
    stats.loss += csm_loss(ref_s, ref_n, est, mode, forced).total;
    const AudioClip enhanced = istft(est.specs[0]);
    stats.snri_db +=
        snr_db(ex.refs[0], enhanced) - snr_db(ex.refs[0], ex.input);
  }
  stats.loss /= static_cast<double>(val_set.size());
  stats.snri_db /= static_cast<double>(val_set.size());
  return stats;
}

void write_sidecar(const std::filesystem::path& path, const ModelConfig& mcfg,
                   const SamplerConfig& scfg, const TrainConfig& tcfg,
                   const StftConfig& stft_cfg, int epoch, int64_t step) {
  nlohmann::json j{{"model", mcfg},     {"sampler", scfg},
                   {"train", tcfg},     {"stft", stft_cfg},
                   {"epoch", epoch},    {"step", step}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                "train: cannot write sidecar " + path.string());
  }
  out << j.dump(2) << "\n";
}

std::string epoch_stem(int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "epoch_%04d", epoch);
  return buf;
}

}  // namespace

void validate_config(const TrainConfig& cfg) {
  const bool ok =
      cfg.lr > 0.0 && cfg.batch_size >= 1 && cfg.epochs >= 0 &&
      cfg.steps_per_epoch >= 1 && cfg.plateau_patience >= 1 &&
      cfg.lr_factor > 0.0 && cfg.lr_factor < 1.0 && cfg.adam_beta1 > 0.0 &&
      cfg.adam_beta1 < 1.0 && cfg.adam_beta2 > 0.0 && cfg.adam_beta2 < 1.0 &&
      cfg.adam_eps > 0.0 && cfg.val_examples >= 1;
  if (!ok) {
    throw Error(ErrorCode::kConfigError,
                "train config: a field is out of range (lr > 0, "
                "0 < lr_factor < 1, plateau_patience >= 1, ...)");
  }
}

double global_grad_norm(const std::map<std::string, Tensor>& grads) {
  double sq = 0.0;
  for (const auto& [name, g] : grads) {
    for (double v : g.data) sq += v * v;
  }
  return std::sqrt(sq);
}

bool clip_gradients(std::map<std::string, Tensor>* grads, double max_norm) {
  const double norm = global_grad_norm(*grads);
  if (norm <= max_norm) return false;
  const double scale = max_norm / norm;
  for (auto& [name, g] : *grads) {
    for (double& v : g.data) v *= scale;
  }
  return true;
}

void adam_step(Parameters* params, const std::map<std::string, Tensor>& grads,
               AdamState* state, double lr, const TrainConfig& cfg) {
  if (grads.size() != params->values.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "adam: gradient keys do not match parameters");
  }
  if (state->m.empty()) {
    for (const auto& [name, p] : params->values) {
      state->m.emplace(name, Tensor(p.shape));
      state->v.emplace(name, Tensor(p.shape));
    }
  }
  state->step += 1;
  const double bc1 =
      1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state->step));
  const double bc2 =
      1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state->step));

  for (auto& [name, p] : params->values) {
    const auto git = grads.find(name);
    if (git == grads.end() || !git->second.same_shape(p)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "adam: missing or misshapen gradient for " + name);
    }
    const Tensor& g = git->second;
    if (!all_finite(g)) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "adam: non-finite gradient for " + name);
    }
    Tensor& m = state->m.at(name);
    Tensor& v = state->v.at(name);
    for (size_t i = 0; i < p.data.size(); ++i) {
      const double gi = g.data[i];
      m.data[i] = cfg.adam_beta1 * m.data[i] + (1.0 - cfg.adam_beta1) * gi;
      v.data[i] = cfg.adam_beta2 * v.data[i] + (1.0 - cfg.adam_beta2) * gi * gi;
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

bool PlateauScheduler::observe(double val_loss) {
  if (!seen_any_ || val_loss < best_) {
    best_ = val_loss;
    seen_any_ = true;
    stall_ = 0;
    return false;
  }
  if (++stall_ >= patience_) {
    lr_ *= factor_;
    stall_ = 0;
    return true;
  }
  return false;
}

double validate_snri(const Parameters& params, const ModelConfig& mcfg,
                     const StftConfig& stft_cfg,
                     const std::vector<MixExample>& val_set) {
  return validation_stats(params, mcfg, stft_cfg, val_set, MinMode::kPerTerm,
                          nullptr)
      .snri_db;
}

TrainResult train(const Manifest& train_manifest, const Manifest& val_manifest,
                  const ModelConfig& mcfg, const SamplerConfig& scfg,
                  const TrainConfig& tcfg, const StftConfig& stft_cfg,
                  const std::filesystem::path& out_dir,
                  std::vector<double>* step_losses) {
  validate_config(mcfg);
  validate_config(tcfg);
  validate_config(scfg);
  validate_config(stft_cfg);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "train: cannot create " + out_dir.string());
  }

  // The assignment is pinned (output 1 = speech) in supervised mode.
  const std::vector<MixingMatrix> allowed = enumerate_allowed(mcfg.num_outputs);
  const MixingMatrix* forced = tcfg.supervised ? &allowed[0] : nullptr;

  // Fixed validation set: clean targets only, separate seed stream.
  SamplerConfig val_cfg = scfg;
  val_cfg.clean_ratio = 1.0;
  val_cfg.rir_enabled = false;
  val_cfg.seed = derive_seed(tcfg.seed, kTagVal, 0);
  ExampleSampler val_sampler(val_manifest, val_cfg);
  std::vector<MixExample> val_set;
  val_set.reserve(static_cast<size_t>(tcfg.val_examples));
  for (int i = 0; i < tcfg.val_examples; ++i) {
    val_set.push_back(val_sampler.next());
  }

  ExampleSampler sampler(train_manifest, scfg);
  Parameters params = init_params(mcfg, derive_seed(tcfg.seed, kTagInit, 0));

  save_checkpoint(params, out_dir / "init.ckpt");
  write_sidecar(out_dir / "init.json", mcfg, scfg, tcfg, stft_cfg, 0, 0);

  const std::filesystem::path metrics_path = out_dir / "metrics.jsonl";
  std::ofstream metrics(metrics_path, std::ios::trunc);
  if (!metrics) {
    throw Error(ErrorCode::kIoFailure,
                "train: cannot write " + metrics_path.string());
  }

  AdamState adam;
  PlateauScheduler sched(tcfg.lr, tcfg.plateau_patience, tcfg.lr_factor);
  std::filesystem::path best_path = out_dir / "init.ckpt";
  double best_snri = 0.0;
  int best_epoch = 0;
  bool have_best = false;

  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    const double epoch_lr = sched.lr();
    double loss_sum = 0.0;

    for (int step = 0; step < tcfg.steps_per_epoch; ++step) {
      std::map<std::string, Tensor> grads;
      double batch_loss = 0.0;
      for (int b = 0; b < tcfg.batch_size; ++b) {
        const MixExample ex = sampler.next();
        const Spectrogram mix = stft(ex.input, stft_cfg);
        const Spectrogram ref_s = stft(ex.refs[0], stft_cfg);
        const Spectrogram ref_n = stft(ex.refs[1], stft_cfg);

        ModelGraph graph(mcfg, params);
        graph.forward(mix);
        const LossBreakdown bd =
            graph.add_loss(ref_s, ref_n, tcfg.loss_mode, forced);
        graph.backward(1.0 / tcfg.batch_size);
        graph.accumulate_grads(&grads);
        batch_loss += bd.total / tcfg.batch_size;
      }
      if (!std::isfinite(batch_loss)) {
        save_checkpoint(params, out_dir / "diverged.ckpt");
        write_sidecar(out_dir / "diverged.json", mcfg, scfg, tcfg, stft_cfg,
                      epoch, adam.step);
        throw Error(ErrorCode::kDivergedLoss,
                    "train: non-finite loss at epoch " +
                        std::to_string(epoch) + "; state dumped to " +
                        (out_dir / "diverged.ckpt").string());
      }
      if (clip_gradients(&grads, kGradClipNorm)) {
        std::cerr << "[train] epoch " << epoch << " step " << step
                  << ": gradient norm clipped to " << kGradClipNorm << "\n";
      }
      adam_step(&params, grads, &adam, epoch_lr, tcfg);
      loss_sum += batch_loss;
      if (step_losses != nullptr) step_losses->push_back(batch_loss);
    }
    const double train_loss = loss_sum / tcfg.steps_per_epoch;

    const ValStats val = validation_stats(params, mcfg, stft_cfg, val_set,
                                          tcfg.loss_mode, forced);

    nlohmann::ordered_json line{{"epoch", epoch},
                                {"train_loss", train_loss},
                                {"val_loss", val.loss},
                                {"val_snri_db", val.snri_db},
                                {"lr", epoch_lr}};
    metrics << line.dump() << "\n";
    metrics.flush();
    std::cerr << "[train] epoch " << epoch << ": train_loss " << train_loss
              << ", val_loss " << val.loss << ", val_snri_db " << val.snri_db
              << ", lr " << epoch_lr << "\n";

    const std::string stem = epoch_stem(epoch);
    const std::filesystem::path ckpt = out_dir / (stem + ".ckpt");
    save_checkpoint(params, ckpt);
    write_sidecar(out_dir / (stem + ".json"), mcfg, scfg, tcfg, stft_cfg,
                  epoch, adam.step);

    if (!have_best || val.snri_db > best_snri) {
      have_best = true;
      best_snri = val.snri_db;
      best_epoch = epoch;
      best_path = ckpt;
    }
    if (sched.observe(val.loss)) {
      std::cerr << "[train] validation loss stalled "
                << tcfg.plateau_patience << " epochs; lr halved to "
                << sched.lr() << "\n";
    }
  }

  std::filesystem::copy_file(best_path, out_dir / "best.ckpt",
                             std::filesystem::copy_options::overwrite_existing,
                             ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure, "train: cannot write best checkpoint");
  }
  write_sidecar(out_dir / "best.json", mcfg, scfg, tcfg, stft_cfg, best_epoch,
                adam.step);

  TrainResult result;
  result.best_checkpoint = out_dir / "best.ckpt";
  result.metrics_path = metrics_path;
  result.best_epoch = best_epoch;
  result.best_snri_db = have_best ? best_snri : 0.0;
  return result;
}

}  // namespace mixenh
