// tests/test-capi.cc

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

// Exercises the shared-library C interface end to end. The C++ core is
// linked in as well, purely to compute oracle values for comparison.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <mixenh.h>
#include <nlohmann/json.hpp>

#include "audio-io.h"
#include "postproc.h"
#include "rng.h"
#include "test-util.h"

using namespace mixenh;
using mixenh::testing::TempDir;
using mixenh::testing::random_clip;
using mixenh::testing::read_file_bytes;
using mixenh::testing::write_text;

namespace {

// Takes ownership of a char* out-parameter result.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  mixenh_string_free(s);
  return out;
}

std::vector<std::string> csv_lines(const std::filesystem::path& p) {
  const auto bytes = read_file_bytes(p);
  std::vector<std::string> lines;
  std::string cur;
  for (char c : bytes) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

TEST_CASE("status names are stable identifiers") {
  CHECK(std::string(mixenh_status_name(MIXENH_OK)) == "ok");
  CHECK(std::string(mixenh_status_name(MIXENH_ERR_CONFIG)) == "config_error");
  CHECK(std::string(mixenh_status_name(MIXENH_ERR_UNSUPPORTED_OUTPUTS)) ==
        "unsupported_outputs");
  CHECK(std::string(mixenh_status_name(MIXENH_ERR_DIVERGED_LOSS)) ==
        "diverged_loss");
}

TEST_CASE("enum_matrices returns the constrained assignment set") {
  char* json = nullptr;
  REQUIRE(mixenh_enum_matrices(3, &json) == MIXENH_OK);
  const auto j = nlohmann::json::parse(take(json));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 3);
  const nlohmann::json expect = nlohmann::json::parse(
      "[[[1,0,0],[0,1,1]],[[1,1,0],[0,0,1]],[[1,0,1],[0,1,0]]]");
  CHECK(j == expect);

  json = nullptr;
  REQUIRE(mixenh_enum_matrices(2, &json) == MIXENH_OK);
  CHECK(nlohmann::json::parse(take(json)) ==
        nlohmann::json::parse("[[[1,0],[0,1]]]"));

  char* untouched = nullptr;
  CHECK(mixenh_enum_matrices(5, &untouched) ==
        MIXENH_ERR_UNSUPPORTED_OUTPUTS);
  CHECK(untouched == nullptr);
  CHECK(std::strlen(mixenh_last_error()) > 0);

  CHECK(mixenh_enum_matrices(3, nullptr) == MIXENH_ERR_INVALID_ARGUMENT);
}

TEST_CASE("null pointers are rejected uniformly") {
  int64_t n = 0;
  CHECK(mixenh_build_manifest(nullptr, "clean", "/tmp/x", &n, nullptr) ==
        MIXENH_ERR_INVALID_ARGUMENT);
  CHECK(mixenh_simulate(nullptr, 1, 1, 1, 0) == MIXENH_ERR_INVALID_ARGUMENT);
  CHECK(mixenh_resolve_config(nullptr, nullptr) ==
        MIXENH_ERR_INVALID_ARGUMENT);
  CHECK(mixenh_train_run(nullptr, nullptr, nullptr, nullptr) ==
        MIXENH_ERR_INVALID_ARGUMENT);
  CHECK(mixenh_eval_snr(nullptr, "a", "b", "c") ==
        MIXENH_ERR_INVALID_ARGUMENT);
  // mixenh_gradcheck is absent on purpose: both of its pointer parameters are
  // optional outputs, so an all-null call is legal.
  CHECK(mixenh_enhancer_open(nullptr, nullptr) ==
        MIXENH_ERR_INVALID_ARGUMENT);
  mixenh_enhancer_close(nullptr);  // must be a harmless no-op
}

TEST_CASE("simulate and build_manifest agree on the corpus") {
  TempDir tmp("t");
  const std::string corpus = (tmp.path() / "corpus").string();
  REQUIRE(mixenh_simulate(corpus.c_str(), 2, 2, 1, 9) == MIXENH_OK);
  CHECK(std::filesystem::exists(tmp.path() / "corpus" / "all.jsonl"));
  CHECK(std::filesystem::exists(tmp.path() / "corpus" / "clean.jsonl"));

  int64_t count = -1, skipped = -1;
  const std::string clean_dir = (tmp.path() / "corpus" / "clean").string();
  const std::string manifest = (tmp.path() / "rebuilt.jsonl").string();
  REQUIRE(mixenh_build_manifest(clean_dir.c_str(), "clean", manifest.c_str(),
                                &count, &skipped) == MIXENH_OK);
  CHECK(count == 2);
  CHECK(skipped == 0);
  const auto lines = csv_lines(manifest);  // splits on newlines
  REQUIRE(lines.size() == 2);
  for (const auto& line : lines) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("kind").get<std::string>() == "clean");
    CHECK(j.at("duration_s").get<double>() == doctest::Approx(4.0));
  }

  CHECK(mixenh_build_manifest(clean_dir.c_str(), "speech", manifest.c_str(),
                              nullptr, nullptr) ==
        MIXENH_ERR_INVALID_ARGUMENT);
  CHECK(mixenh_build_manifest((tmp.path() / "nope").string().c_str(), "clean",
                              manifest.c_str(), nullptr, nullptr) ==
        MIXENH_ERR_IO);
}

TEST_CASE("resolve_config echoes a fully defaulted document") {
  TempDir tmp("t");
  write_text(tmp.path() / "run.json",
             R"({"train": {"epochs": 3}, "manifest": "corpus/all.jsonl"})");
  char* out = nullptr;
  REQUIRE(mixenh_resolve_config((tmp.path() / "run.json").string().c_str(),
                                &out) == MIXENH_OK);
  const auto j = nlohmann::json::parse(take(out));
  CHECK(j.at("train").at("epochs").get<int>() == 3);
  CHECK(j.at("train").at("batch_size").get<int>() == 8);  // default echoed
  CHECK(j.at("model").at("num_outputs").get<int>() == 3);
  CHECK(j.at("manifest").get<std::string>() ==
        (tmp.path() / "corpus/all.jsonl").string());

  write_text(tmp.path() / "bad.json", R"({"train": {"lr": "fast"}})");
  char* untouched = nullptr;
  CHECK(mixenh_resolve_config((tmp.path() / "bad.json").string().c_str(),
                              &untouched) == MIXENH_ERR_CONFIG);
  CHECK(untouched == nullptr);
  CHECK(mixenh_resolve_config((tmp.path() / "absent.json").string().c_str(),
                              &untouched) == MIXENH_ERR_IO);
}

TEST_CASE("gradcheck passes clean and flags an injected error") {
  double max_rel = -1.0;
  char* report = nullptr;
  REQUIRE(mixenh_gradcheck(3, 2, 0, &max_rel, &report) == MIXENH_OK);
  const auto j = nlohmann::json::parse(take(report));
  CHECK(max_rel >= 0.0);
  CHECK(max_rel <= 1e-4);
  CHECK(j.at("max_rel_err").get<double>() == max_rel);
  CHECK(j.at("tolerance").get<double>() == 1e-4);
  CHECK(j.at("total_probes").get<int>() > 0);
  CHECK(j.contains("worst_param"));

  double bad_rel = -1.0;
  REQUIRE(mixenh_gradcheck(3, 2, 1, &bad_rel, nullptr) == MIXENH_OK);
  CHECK(bad_rel > 1e-4);  // the corruption must be caught
}

TEST_CASE("train_run, enhancer, and eval_snr cover the pipeline") {
  TempDir tmp("t");
  const std::string corpus = (tmp.path() / "corpus").string();
  REQUIRE(mixenh_simulate(corpus.c_str(), 2, 2, 2, 5) == MIXENH_OK);

  write_text(tmp.path() / "run.json", R"({
  "model": {"num_outputs": 3, "base_channels": 4, "enc_depth": 2,
            "tcn_repeats": 1, "tcn_blocks": 2},
  "sampler": {"chunk_len": 2048, "clean_ratio": 0.5},
  "train": {"epochs": 1, "steps_per_epoch": 2, "batch_size": 1,
            "val_examples": 1},
  "manifest": "corpus/all.jsonl"
})");

  const std::string run_dir = (tmp.path() / "run").string();
  const uint64_t seed = 11;
  char* summary_raw = nullptr;
  REQUIRE(mixenh_train_run((tmp.path() / "run.json").string().c_str(),
                           run_dir.c_str(), &seed,
                           &summary_raw) == MIXENH_OK);
  const auto summary = nlohmann::json::parse(take(summary_raw));
  const std::string best = summary.at("best_checkpoint").get<std::string>();
  CHECK(std::filesystem::exists(best));
  CHECK(std::filesystem::exists(summary.at("metrics").get<std::string>()));
  CHECK(summary.at("best_epoch").get<int>() >= 0);
  CHECK(std::isfinite(summary.at("best_snri_db").get<double>()));
  CHECK(std::filesystem::exists(tmp.path() / "run" / "resolved_config.json"));
  {
    const auto bytes = read_file_bytes(tmp.path() / "run" /
                                       "resolved_config.json");
    const auto echoed =
        nlohmann::json::parse(std::string(bytes.begin(), bytes.end()));
    CHECK(echoed.at("train").at("epochs").get<int>() == 1);
    CHECK(echoed.at("train").at("seed").get<uint64_t>() == seed);
    CHECK(echoed.at("sampler").at("seed").get<uint64_t>() == seed);
  }

  // --- enhancement over a directory, then over a single file -------------
  mixenh_enhancer* enh = nullptr;
  REQUIRE(mixenh_enhancer_open(best.c_str(), &enh) == MIXENH_OK);
  REQUIRE(enh != nullptr);

  const std::string noisy_dir = corpus + "/noisy";
  const std::string out_all = (tmp.path() / "enhanced").string();
  int files = 0;
  REQUIRE(mixenh_enhancer_run(enh, noisy_dir.c_str(), out_all.c_str(),
                              nullptr, &files) == MIXENH_OK);
  CHECK(files == 2);

  std::filesystem::path one_noisy;
  for (const auto& entry :
       std::filesystem::directory_iterator(noisy_dir)) {
    if (entry.path().extension() == ".wav") {
      one_noisy = entry.path();
      break;
    }
  }
  REQUIRE(!one_noisy.empty());

  const std::string out_remix = (tmp.path() / "remixed").string();
  const double beta = 0.0;
  REQUIRE(mixenh_enhancer_run(enh, one_noisy.string().c_str(),
                              out_remix.c_str(), &beta, &files) == MIXENH_OK);
  CHECK(files == 1);

  // The remixed file blends the enhanced signal with the input at 0 dB:
  // measuring the enhanced file against the remixed one recovers beta.
  const AudioClip e = read_wav(std::filesystem::path(out_all) /
                               one_noisy.filename());
  const AudioClip z = read_wav(std::filesystem::path(out_remix) /
                               one_noisy.filename());
  // Loose bound: both files went through 16-bit quantization.
  CHECK(std::abs(snr_db(e, z)) <= 0.5);

  mixenh_enhancer_close(enh);

  mixenh_enhancer* missing = nullptr;
  CHECK(mixenh_enhancer_open((tmp.path() / "no.ckpt").string().c_str(),
                             &missing) == MIXENH_ERR_IO);
  CHECK(missing == nullptr);

  // --- eval_snr ------------------------------------------------------------
  // Build a controlled scoring setup: processed == noisy must score
  // snri 0, processed == clean must hit the +100 cap.
  const auto c_dir = tmp.path() / "score" / "clean";
  const auto n_dir = tmp.path() / "score" / "noisy";
  const auto p_dir = tmp.path() / "score" / "processed";
  std::filesystem::create_directories(c_dir);
  std::filesystem::create_directories(n_dir);
  std::filesystem::create_directories(p_dir);

  RandomGen rng(91);
  const AudioClip clean_a = random_clip(2000, &rng, 0.3);
  const AudioClip noise_a = random_clip(2000, &rng, 0.15);
  AudioClip noisy_a = clean_a;
  for (size_t i = 0; i < noisy_a.samples.size(); ++i) {
    noisy_a.samples[i] += noise_a.samples[i];
  }
  write_wav(clean_a, c_dir / "a.wav");
  write_wav(noisy_a, n_dir / "a.wav");
  std::filesystem::copy_file(n_dir / "a.wav", p_dir / "a.wav");

  const AudioClip clean_b = random_clip(2000, &rng, 0.3);
  AudioClip noisy_b = clean_b;
  const AudioClip noise_b = random_clip(2000, &rng, 0.15);
  for (size_t i = 0; i < noisy_b.samples.size(); ++i) {
    noisy_b.samples[i] += noise_b.samples[i];
  }
  write_wav(clean_b, c_dir / "b.wav");
  write_wav(noisy_b, n_dir / "b.wav");
  std::filesystem::copy_file(c_dir / "b.wav", p_dir / "b.wav");

  int64_t nclean = 0;
  const std::string score_manifest = (tmp.path() / "score.jsonl").string();
  REQUIRE(mixenh_build_manifest(c_dir.string().c_str(), "clean",
                                score_manifest.c_str(), &nclean,
                                nullptr) == MIXENH_OK);
  REQUIRE(nclean == 2);

  const std::string csv = (tmp.path() / "report.csv").string();
  REQUIRE(mixenh_eval_snr(score_manifest.c_str(), p_dir.string().c_str(),
                          n_dir.string().c_str(), csv.c_str()) == MIXENH_OK);

  const auto lines = csv_lines(csv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "path,snr_in_db,snr_out_db,snri_db");

  // Row a: processed == noisy.
  {
    REQUIRE(lines[1].find("/a.wav,") != std::string::npos);
    const AudioClip cw = read_wav(c_dir / "a.wav");
    const AudioClip nw = read_wav(n_dir / "a.wav");
    const std::string want = fmt6(snr_db(cw, nw));
    CHECK(lines[1].find("," + want + "," + want + ",0.000000") !=
          std::string::npos);
  }
  // Row b: processed == clean -> capped at 100 dB.
  {
    const AudioClip cw = read_wav(c_dir / "b.wav");
    const AudioClip nw = read_wav(n_dir / "b.wav");
    const double in_db = snr_db(cw, nw);
    CHECK(lines[2].find("," + fmt6(in_db) + ",100.000000," +
                        fmt6(100.0 - in_db)) != std::string::npos);
  }

  // Missing processed file names the path.
  std::filesystem::remove(p_dir / "a.wav");
  CHECK(mixenh_eval_snr(score_manifest.c_str(), p_dir.string().c_str(),
                        n_dir.string().c_str(), csv.c_str()) ==
        MIXENH_ERR_IO);
  CHECK(std::string(mixenh_last_error()).find("a.wav") != std::string::npos);
}
