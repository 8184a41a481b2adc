// tools/mixenh-main.cc

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

// Command-line front end; all functionality is reached through the C API in
// mixenh.h. Exit codes: 0 success, 2 usage or configuration error, 1 runtime
// failure. Machine-readable results go to files, diagnostics to stderr.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mixenh.h"

namespace {

int exit_code(mixenh_status status) {
  switch (status) {
    case MIXENH_OK:
      return 0;
    case MIXENH_ERR_CONFIG:
    case MIXENH_ERR_INVALID_ARGUMENT:
    case MIXENH_ERR_UNSUPPORTED_OUTPUTS:
      return 2;
    default:
      return 1;
  }
}

int report_failure(mixenh_status status) {
  std::fprintf(stderr, "error (%s): %s\n", mixenh_status_name(status),
               mixenh_last_error());
  return exit_code(status);
}

// Must match the acceptance threshold echoed in the gradcheck report JSON.
constexpr double kGradcheckTolerance = 1e-4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mixenh: semi-supervised speech enhancement "
      "(corpus tools, training, inference, evaluation)"};
  app.require_subcommand(1);

  // --- manifest ---
  auto* c_manifest = app.add_subcommand(
      "manifest", "Scan a directory tree of WAV files into a manifest");
  std::string man_root, man_kind, man_out;
  c_manifest->add_option("--root", man_root, "Directory to scan recursively")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_manifest
      ->add_option("--kind", man_kind, "Label for every entry")
      ->required()
      ->check(CLI::IsMember({"clean", "noise", "noisy"}));
  c_manifest->add_option("--out", man_out, "JSON-lines manifest to write")
      ->required();

  // --- simulate ---
  auto* c_sim = app.add_subcommand(
      "simulate", "Generate the seeded synthetic training corpus");
  std::string sim_out;
  int sim_clean = 20, sim_noise = 20, sim_noisy = 20;
  uint64_t sim_seed = 0;
  c_sim->add_option("--out", sim_out, "Corpus root directory")->required();
  c_sim->add_option("--clean", sim_clean, "Number of clean clips");
  c_sim->add_option("--noise", sim_noise, "Number of noise clips");
  c_sim->add_option("--noisy", sim_noisy, "Number of premixed noisy clips");
  c_sim->add_option("--seed", sim_seed, "Corpus generation seed");

  // --- train ---
  auto* c_train =
      app.add_subcommand("train", "Run the training loop from a config file");
  std::string train_config, train_out;
  uint64_t train_seed = 0;
  c_train->add_option("--config", train_config, "Run-config JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  c_train->add_option("--out", train_out, "Output directory for checkpoints")
      ->required();
  auto* train_seed_opt = c_train->add_option(
      "--seed", train_seed, "Overrides the sampler and trainer seeds");

  // --- enhance ---
  auto* c_enh = app.add_subcommand(
      "enhance", "Denoise a WAV file or a directory of WAV files");
  std::string enh_ckpt, enh_in, enh_out;
  double enh_beta = 0.0;
  c_enh->add_option("--checkpoint", enh_ckpt, "Trained checkpoint (.ckpt)")
      ->required()
      ->check(CLI::ExistingFile);
  c_enh->add_option("--in", enh_in, "Input WAV file or directory")
      ->required()
      ->check(CLI::ExistingPath);
  c_enh->add_option("--out", enh_out, "Output directory")->required();
  auto* enh_beta_opt = c_enh->add_option(
      "--remix-beta", enh_beta,
      "Blend the enhanced signal with the unprocessed input at this SNR (dB)");

  // --- eval-snr ---
  auto* c_eval = app.add_subcommand(
      "eval-snr", "Score processed files against clean references (CSV)");
  std::string eval_clean, eval_proc, eval_noisy, eval_out;
  c_eval->add_option("--clean", eval_clean, "Manifest of clean references")
      ->required()
      ->check(CLI::ExistingFile);
  c_eval
      ->add_option("--processed", eval_proc, "Directory of processed files")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_eval->add_option("--noisy", eval_noisy, "Directory of unprocessed inputs")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_eval->add_option("--out", eval_out, "CSV report to write")->required();

  // --- gradcheck ---
  auto* c_grad = app.add_subcommand(
      "gradcheck",
      "Verify analytic gradients against finite differences (debug)");
  uint64_t grad_seed = 0;
  int grad_probes = 50;
  bool grad_inject = false;
  c_grad->add_option("--seed", grad_seed, "Probe-network and data seed");
  c_grad->add_option("--probes", grad_probes,
                     "Coordinates probed per parameter tensor");
  c_grad
      ->add_flag("--inject-error", grad_inject,
                 "Corrupt one gradient group so the check must fail")
      ->group("");  // test hook, hidden from --help

  // --- enum-mix ---
  auto* c_enum = app.add_subcommand(
      "enum-mix", "Print the allowed mixing matrices for M output channels");
  int enum_m = 3;
  c_enum->add_option("M", enum_m, "Number of model output channels")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (app.got_subcommand(c_manifest)) {
    int64_t count = 0, skipped = 0;
    const mixenh_status st = mixenh_build_manifest(
        man_root.c_str(), man_kind.c_str(), man_out.c_str(), &count, &skipped);
    if (st != MIXENH_OK) return report_failure(st);
    std::fprintf(stderr, "manifest: %lld entries (%lld skipped) -> %s\n",
                 static_cast<long long>(count),
                 static_cast<long long>(skipped), man_out.c_str());
    return 0;
  }

  if (app.got_subcommand(c_sim)) {
    const mixenh_status st = mixenh_simulate(sim_out.c_str(), sim_clean,
                                             sim_noise, sim_noisy, sim_seed);
    if (st != MIXENH_OK) return report_failure(st);
    std::fprintf(stderr,
                 "simulate: %d clean / %d noise / %d noisy clips -> %s\n",
                 sim_clean, sim_noise, sim_noisy, sim_out.c_str());
    return 0;
  }

  if (app.got_subcommand(c_train)) {
    char* summary = nullptr;
    const mixenh_status st = mixenh_train_run(
        train_config.c_str(), train_out.c_str(),
        train_seed_opt->count() > 0 ? &train_seed : nullptr, &summary);
    if (st != MIXENH_OK) return report_failure(st);
    std::fprintf(stderr, "train: done\n%s\n", summary);
    mixenh_string_free(summary);
    return 0;
  }

  if (app.got_subcommand(c_enh)) {
    mixenh_enhancer* enh = nullptr;
    mixenh_status st = mixenh_enhancer_open(enh_ckpt.c_str(), &enh);
    if (st != MIXENH_OK) return report_failure(st);
    int files = 0;
    st = mixenh_enhancer_run(enh, enh_in.c_str(), enh_out.c_str(),
                             enh_beta_opt->count() > 0 ? &enh_beta : nullptr,
                             &files);
    mixenh_enhancer_close(enh);
    if (st != MIXENH_OK) return report_failure(st);
    std::fprintf(stderr, "enhance: wrote %d file(s) -> %s\n", files,
                 enh_out.c_str());
    return 0;
  }

  if (app.got_subcommand(c_eval)) {
    const mixenh_status st =
        mixenh_eval_snr(eval_clean.c_str(), eval_proc.c_str(),
                        eval_noisy.c_str(), eval_out.c_str());
    if (st != MIXENH_OK) return report_failure(st);
    std::fprintf(stderr, "eval-snr: report -> %s\n", eval_out.c_str());
    return 0;
  }

  if (app.got_subcommand(c_grad)) {
    double max_rel = 0.0;
    char* report = nullptr;
    const mixenh_status st = mixenh_gradcheck(
        grad_seed, grad_probes, grad_inject ? 1 : 0, &max_rel, &report);
    if (st != MIXENH_OK) return report_failure(st);
    std::printf("%s\n", report);
    mixenh_string_free(report);
    const bool ok = max_rel <= kGradcheckTolerance;
    std::fprintf(stderr, "gradcheck: max relative error %.6e (%s)\n", max_rel,
                 ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
  }

  if (app.got_subcommand(c_enum)) {
    char* json = nullptr;
    const mixenh_status st = mixenh_enum_matrices(enum_m, &json);
    if (st != MIXENH_OK) return report_failure(st);
    std::printf("%s\n", json);
    mixenh_string_free(json);
    return 0;
  }

  return 2;  // unreachable with require_subcommand(1)
}
