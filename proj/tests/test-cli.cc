// tests/test-cli.cc

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

// Black-box tests of the installed command-line binary. The binary path is
// injected at compile time (MIXENH_CLI_PATH); every invocation runs through
// the shell with stdout/stderr captured to files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audio-io.h"
#include "mixer.h"
#include "test-util.h"

using namespace mixenh;
using mixenh::testing::TempDir;
using mixenh::testing::read_file_bytes;
using mixenh::testing::write_text;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

std::string slurp(const std::filesystem::path& p) {
  const auto bytes = read_file_bytes(p);
  return std::string(bytes.begin(), bytes.end());
}

// Runs the CLI with the given argument string inside `dir` for capture files.
RunResult run_cli(const TempDir& dir, const std::string& args) {
  static int counter = 0;
  const auto out_path = dir.path() / ("stdout." + std::to_string(counter));
  const auto err_path = dir.path() / ("stderr." + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string(MIXENH_CLI_PATH) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

}  // namespace

TEST_CASE("usage errors exit 2; --help exits 0 and documents subcommands") {
  TempDir tmp("t");
  CHECK(run_cli(tmp, "").exit_code == 2);
  CHECK(run_cli(tmp, "no-such-command").exit_code == 2);
  CHECK(run_cli(tmp, "manifest").exit_code == 2);  // missing required flags

  const RunResult help = run_cli(tmp, "--help");
  CHECK(help.exit_code == 0);
  for (const char* sub : {"manifest", "simulate", "train", "enhance",
                          "eval-snr", "gradcheck", "enum-mix"}) {
    CHECK_MESSAGE(help.out.find(sub) != std::string::npos,
                  "--help does not mention ", sub);
  }
  CHECK(run_cli(tmp, "enhance --help").exit_code == 0);
}

TEST_CASE("enum-mix prints the assignment sets and rejects M=5") {
  TempDir tmp("t");
  const RunResult three = run_cli(tmp, "enum-mix 3");
  CHECK(three.exit_code == 0);
  CHECK(nlohmann::json::parse(three.out) ==
        nlohmann::json::parse(
            "[[[1,0,0],[0,1,1]],[[1,1,0],[0,0,1]],[[1,0,1],[0,1,0]]]"));

  const RunResult two = run_cli(tmp, "enum-mix 2");
  CHECK(two.exit_code == 0);
  CHECK(nlohmann::json::parse(two.out).size() == 1);

  const RunResult five = run_cli(tmp, "enum-mix 5");
  CHECK(five.exit_code == 2);
  CHECK(five.err.find("unsupported_outputs") != std::string::npos);
}

TEST_CASE("manifest command reports skips and rejects missing roots") {
  TempDir tmp("t");
  const RunResult missing = run_cli(
      tmp, "manifest --root " + (tmp.path() / "nowhere").string() +
               " --kind clean --out " + (tmp.path() / "m.jsonl").string());
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("nowhere") != std::string::npos);

  // One good file, one piece of junk: the junk is skipped, not fatal.
  REQUIRE(run_cli(tmp, "simulate --out " + (tmp.path() / "c").string() +
                           " --clean 1 --noise 0 --noisy 0 --seed 4")
              .exit_code == 0);
  write_text(tmp.path() / "c" / "clean" / "junk.wav", "not a wav at all");
  const RunResult built = run_cli(
      tmp, "manifest --root " + (tmp.path() / "c" / "clean").string() +
               " --kind clean --out " + (tmp.path() / "m.jsonl").string());
  CHECK(built.exit_code == 0);
  CHECK(built.err.find("1 entries") != std::string::npos);
  CHECK(built.err.find("(1 skipped)") != std::string::npos);
  CHECK(std::filesystem::exists(tmp.path() / "m.jsonl"));
}

TEST_CASE("simulate is deterministic in the seed; zero counts succeed") {
  TempDir tmp("t");
  REQUIRE(run_cli(tmp, "simulate --out " + (tmp.path() / "s1").string() +
                           " --clean 2 --noise 1 --noisy 1 --seed 12")
              .exit_code == 0);
  REQUIRE(run_cli(tmp, "simulate --out " + (tmp.path() / "s2").string() +
                           " --clean 2 --noise 1 --noisy 1 --seed 12")
              .exit_code == 0);
  for (const char* rel :
       {"clean/clean_0000.wav", "clean/clean_0001.wav", "noise/noise_0000.wav",
        "noisy/noisy_0000.wav"}) {
    CHECK_MESSAGE(read_file_bytes(tmp.path() / "s1" / rel) ==
                      read_file_bytes(tmp.path() / "s2" / rel),
                  rel, " differs between same-seed runs");
  }
  for (const char* m :
       {"all.jsonl", "clean.jsonl", "noise.jsonl", "noisy.jsonl"}) {
    CHECK(std::filesystem::exists(tmp.path() / "s1" / m));
  }

  const RunResult empty = run_cli(
      tmp, "simulate --out " + (tmp.path() / "s0").string() +
               " --clean 0 --noise 0 --noisy 0 --seed 1");
  CHECK(empty.exit_code == 0);
  CHECK(std::filesystem::exists(tmp.path() / "s0" / "all.jsonl"));
}

TEST_CASE("gradcheck passes, fails on demand, and repeats bit for bit") {
  TempDir tmp("t");
  const RunResult a = run_cli(tmp, "gradcheck --seed 5 --probes 2");
  CHECK(a.exit_code == 0);
  const auto report = nlohmann::json::parse(a.out);
  CHECK(report.at("max_rel_err").get<double>() <= 1e-4);
  CHECK(a.err.find("pass") != std::string::npos);

  const RunResult b = run_cli(tmp, "gradcheck --seed 5 --probes 2");
  CHECK(b.out == a.out);  // same seed, same printed error values

  const RunResult bad =
      run_cli(tmp, "gradcheck --seed 5 --probes 2 --inject-error");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("FAIL") != std::string::npos);
}

TEST_CASE("train, enhance, remix, and eval-snr round trip") {
  TempDir tmp("t");
  REQUIRE(run_cli(tmp, "simulate --out " + (tmp.path() / "corpus").string() +
                           " --clean 2 --noise 2 --noisy 2 --seed 6")
              .exit_code == 0);

  write_text(tmp.path() / "run.json", R"({
  "model": {"num_outputs": 3, "base_channels": 4, "enc_depth": 2,
            "tcn_repeats": 1, "tcn_blocks": 2},
  "sampler": {"chunk_len": 2048, "clean_ratio": 0.5},
  "train": {"epochs": 1, "steps_per_epoch": 2, "batch_size": 1,
            "val_examples": 1},
  "manifest": "corpus/all.jsonl"
})");

  SUBCASE("config with an unknown key exits 2 naming the key") {
    write_text(tmp.path() / "bad.json", R"({"train": {"bogus_key": 1}})");
    const RunResult r =
        run_cli(tmp, "train --config " + (tmp.path() / "bad.json").string() +
                         " --out " + (tmp.path() / "runX").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("train.bogus_key") != std::string::npos);
  }

  SUBCASE("full pipeline") {
    const RunResult trained =
        run_cli(tmp, "train --config " + (tmp.path() / "run.json").string() +
                         " --out " + (tmp.path() / "run").string() +
                         " --seed 11");
    REQUIRE_MESSAGE(trained.exit_code == 0, trained.err);
    const auto best = tmp.path() / "run" / "best.ckpt";
    REQUIRE(std::filesystem::exists(best));
    CHECK(std::filesystem::exists(tmp.path() / "run" / "metrics.jsonl"));
    CHECK(std::filesystem::exists(tmp.path() / "run" /
                                  "resolved_config.json"));

    // Single-file enhancement: same name, same length.
    const auto noisy_in = tmp.path() / "corpus" / "noisy" / "noisy_0000.wav";
    const RunResult enh =
        run_cli(tmp, "enhance --checkpoint " + best.string() + " --in " +
                         noisy_in.string() + " --out " +
                         (tmp.path() / "enh").string());
    REQUIRE_MESSAGE(enh.exit_code == 0, enh.err);
    const auto enh_wav = tmp.path() / "enh" / "noisy_0000.wav";
    REQUIRE(std::filesystem::exists(enh_wav));
    const AudioClip in_clip = read_wav(noisy_in);
    const AudioClip out_clip = read_wav(enh_wav);
    CHECK(out_clip.samples.size() == in_clip.samples.size());

    // Directory enhancement mirrors the names.
    const RunResult enh_dir =
        run_cli(tmp, "enhance --checkpoint " + best.string() + " --in " +
                         (tmp.path() / "corpus" / "noisy").string() +
                         " --out " + (tmp.path() / "enh-dir").string());
    REQUIRE(enh_dir.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.path() / "enh-dir" / "noisy_0000.wav"));
    CHECK(std::filesystem::exists(tmp.path() / "enh-dir" / "noisy_0001.wav"));

    // --remix-beta 0 equals enhance-then-remix by hand, up to quantization.
    // The blend gain is recovered by least squares so 16-bit rounding of the
    // stored enhanced file cannot inflate the comparison; samples near the
    // clipping boundary are excluded.
    const RunResult rem =
        run_cli(tmp, "enhance --checkpoint " + best.string() + " --in " +
                         noisy_in.string() + " --out " +
                         (tmp.path() / "rem").string() + " --remix-beta 0");
    REQUIRE(rem.exit_code == 0);
    const AudioClip z = read_wav(tmp.path() / "rem" / "noisy_0000.wav");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < z.samples.size(); ++i) {
      num += (z.samples[i] - out_clip.samples[i]) * in_clip.samples[i];
      den += in_clip.samples[i] * in_clip.samples[i];
    }
    const double g_fit = num / den;
    CHECK(g_fit == doctest::Approx(snr_gain(out_clip, in_clip, 0.0))
                       .epsilon(0.05));
    double worst = 0.0;
    for (size_t i = 0; i < z.samples.size(); ++i) {
      const double hand = out_clip.samples[i] + g_fit * in_clip.samples[i];
      if (std::abs(hand) > 0.99 || std::abs(out_clip.samples[i]) > 0.99) {
        continue;
      }
      worst = std::max(worst, std::abs(z.samples[i] - hand));
    }
    CHECK(worst <= 1e-4);

    // eval-snr with processed == noisy: every SNRi is exactly zero.
    const RunResult man = run_cli(
        tmp, "manifest --root " + (tmp.path() / "corpus" / "noisy").string() +
                 " --kind clean --out " + (tmp.path() / "ref.jsonl").string());
    REQUIRE(man.exit_code == 0);
    const RunResult eval = run_cli(
        tmp, "eval-snr --clean " + (tmp.path() / "ref.jsonl").string() +
                 " --processed " +
                 (tmp.path() / "corpus" / "noisy").string() + " --noisy " +
                 (tmp.path() / "corpus" / "noisy").string() + " --out " +
                 (tmp.path() / "report.csv").string());
    REQUIRE_MESSAGE(eval.exit_code == 0, eval.err);
    std::ifstream csv(tmp.path() / "report.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "path,snr_in_db,snr_out_db,snri_db");
    int rows = 0;
    while (std::getline(csv, line)) {
      ++rows;
      CHECK(line.substr(line.rfind(',') + 1) == "0.000000");
    }
    CHECK(rows == 2);

    // A corrupt checkpoint is a runtime failure: exit 1.
    write_text(tmp.path() / "junk.ckpt", "MXC9 not really a checkpoint");
    const RunResult broken =
        run_cli(tmp, "enhance --checkpoint " +
                         (tmp.path() / "junk.ckpt").string() + " --in " +
                         noisy_in.string() + " --out " +
                         (tmp.path() / "b").string());
    CHECK(broken.exit_code == 1);
  }
}
