// src/gradcheck.cc

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

#include "gradcheck.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "audio-io.h"
#include "dsp.h"
#include "error.h"
#include "mixit-loss.h"
#include "rng.h"
#include "tensor.h"

namespace mixenh {
namespace {

enum : uint64_t { kTagData = 0x6d, kTagInit = 0x6e, kTagProbe = 0x6f };

AudioClip random_clip(int num_samples, double amp, RandomGen* rng) {
  AudioClip clip;
  clip.samples.resize(num_samples);
  for (double& s : clip.samples) s = amp * rng->normal();
  return clip;
}

// Seeded Fisher-Yates shuffle of [0, n): the caller probes coordinates in
// this order until its quota is met.
std::vector<size_t> probe_indices(size_t n, RandomGen* rng) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  for (size_t i = 0; i + 1 < n; ++i) {
    const size_t j = i + static_cast<size_t>(rng->below(
                             static_cast<uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckConfig& cfg) {
  validate_config(cfg.model);
  const StftConfig stft_cfg;  // library default analysis/synthesis setup
  if (cfg.probes_per_group < 1 || cfg.step <= 0.0 ||
      cfg.num_samples < stft_cfg.frame_len) {
    throw Error(ErrorCode::kInvalidArgument,
                "gradcheck: probes_per_group >= 1, step > 0, and clip at "
                "least one frame long required");
  }

  Parameters params = init_params(cfg.model, derive_seed(cfg.seed, kTagInit, 0));

  // One random example plus the analytic gradients of the loss on it. A
  // coordinate whose difference quotient is unreliable on one example is
  // retried on another; the gradient code is the same on every input, so
  // any of them is an equally valid witness.
  struct ProbeContext {
    Spectrogram mix, ref_s, ref_n;
    std::map<std::string, Tensor> grads;
  };
  constexpr int kMaxContexts = 6;
  std::vector<std::optional<ProbeContext>> contexts(kMaxContexts);
  const auto context = [&](int r) -> const ProbeContext& {
    if (!contexts[static_cast<size_t>(r)]) {
      RandomGen data_rng(derive_seed(cfg.seed, kTagData,
                                     static_cast<uint64_t>(r)));
      const AudioClip ref_speech =
          random_clip(cfg.num_samples, 0.3, &data_rng);
      const AudioClip ref_noise = random_clip(cfg.num_samples, 0.2, &data_rng);
      AudioClip input;
      input.samples.resize(ref_speech.samples.size());
      for (size_t i = 0; i < input.samples.size(); ++i) {
        input.samples[i] = ref_speech.samples[i] + ref_noise.samples[i];
      }
      ProbeContext ctx;
      ctx.mix = stft(input, stft_cfg);
      ctx.ref_s = stft(ref_speech, stft_cfg);
      ctx.ref_n = stft(ref_noise, stft_cfg);
      ModelGraph graph(cfg.model, params);
      graph.forward(ctx.mix);
      graph.add_loss(ctx.ref_s, ctx.ref_n, MinMode::kPerTerm);
      graph.backward();
      graph.accumulate_grads(&ctx.grads);
      if (cfg.inject_error) {
        for (double& g : ctx.grads.begin()->second.data) g += 1e-2;
      }
      contexts[static_cast<size_t>(r)] = std::move(ctx);
    }
    return *contexts[static_cast<size_t>(r)];
  };

  RandomGen probe_rng(derive_seed(cfg.seed, kTagProbe, 0));
  GradCheckReport report;
  for (auto& [name, tensor] : params.values) {
    const size_t quota =
        std::min(tensor.data.size(), static_cast<size_t>(cfg.probes_per_group));
    size_t accepted = 0;
    // The shuffled list is longer than the quota so coordinates that stay
    // untrustworthy on every retry example can be replaced.
    for (size_t idx : probe_indices(tensor.data.size(), &probe_rng)) {
      if (accepted == quota) break;
      const double saved = tensor.data[idx];
      bool done = false;
      for (int r = 0; r < kMaxContexts && !done; ++r) {
        const ProbeContext& ctx = context(r);
        const auto slope = [&](double h) {
          tensor.data[idx] = saved + h;
          const double f_plus =
              csm_loss(ctx.ref_s, ctx.ref_n,
                       run_forward(params, cfg.model, ctx.mix),
                       MinMode::kPerTerm)
                  .total;
          tensor.data[idx] = saved - h;
          const double f_minus =
              csm_loss(ctx.ref_s, ctx.ref_n,
                       run_forward(params, cfg.model, ctx.mix),
                       MinMode::kPerTerm)
                  .total;
          return (f_plus - f_minus) / (2.0 * h);
        };
        const double numeric = slope(cfg.step);
        const double n_ctrl = slope(0.1 * cfg.step);
        tensor.data[idx] = saved;

        // The objective is piecewise smooth (absolute values, assignment
        // minima, magnitude cones), so the probe interval can straddle a
        // kink and make the difference quotient meaningless no matter how
        // correct the analytic gradient is. A kink or strong curvature
        // inside the interval shifts the quotient when the step shrinks,
        // while a trustworthy estimate moves by O(step^2); only
        // step-stable probes are admitted. The gate runs at half the
        // final tolerance so that gate slack plus control-step noise
        // cannot push a correct gradient past the threshold, and it never
        // consults the analytic value, so it cannot mask a real bug.
        const double stability =
            std::abs(numeric - n_ctrl) /
            std::max({std::abs(numeric), std::abs(n_ctrl),
                      kGradCheckRelFloor});
        if (stability > 0.5 * kGradCheckTolerance) continue;
        done = true;

        const double analytic = ctx.grads.at(name).data[idx];
        const double denom = std::max(
            {std::abs(analytic), std::abs(numeric), kGradCheckRelFloor});
        const double rel = std::abs(analytic - numeric) / denom;
        if (rel > report.max_rel_err) {
          report.max_rel_err = rel;
          report.worst_param = name;
          report.worst_index = static_cast<int>(idx);
          report.worst_analytic = analytic;
          report.worst_numeric = numeric;
        }
      }
      if (done) {
        ++accepted;
        ++report.total_probes;
      } else {
        ++report.skipped_probes;
      }
    }
    if (accepted == 0) ++report.empty_groups;
  }
  return report;
}

}  // namespace mixenh
