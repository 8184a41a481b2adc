// tests/test-checkpoint.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "checkpoint.h"
#include "dsp.h"
#include "error.h"
#include "model.h"
#include "rng.h"
#include "test-util.h"

using namespace mixenh;
using mixenh::testing::TempDir;
using mixenh::testing::random_clip;
using mixenh::testing::read_file_bytes;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.num_outputs = 3;
  cfg.base_channels = 4;
  cfg.enc_depth = 2;
  cfg.tcn_repeats = 1;
  cfg.tcn_blocks = 2;
  return cfg;
}

void write_bytes(const std::filesystem::path& p,
                 const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ErrorCode load_error(const std::filesystem::path& p) {
  try {
    load_checkpoint(p);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected load_checkpoint to throw for ", p.filename().string());
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("round trip restores every tensor bit for bit") {
  TempDir tmp("ckpt");
  const ModelConfig cfg = tiny_config();
  const Parameters params = init_params(cfg, 41);
  const auto path = tmp.path() / "model.ckpt";
  save_checkpoint(params, path);

  const Parameters loaded = load_checkpoint(path);
  REQUIRE(loaded.values.size() == params.values.size());
  for (const auto& [name, t] : params.values) {
    const auto it = loaded.values.find(name);
    REQUIRE(it != loaded.values.end());
    REQUIRE(it->second.shape == t.shape);
    REQUIRE(std::memcmp(it->second.data.data(), t.data.data(),
                        t.data.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("serialization is a pure function of the parameters") {
  TempDir tmp("ckpt");
  const Parameters params = init_params(tiny_config(), 43);
  const auto a = tmp.path() / "a.ckpt";
  const auto b = tmp.path() / "b.ckpt";
  save_checkpoint(params, a);
  save_checkpoint(params, b);
  CHECK(read_file_bytes(a) == read_file_bytes(b));

  const auto header = read_file_bytes(a);
  REQUIRE(header.size() > 4);
  CHECK(header[0] == 'M');
  CHECK(header[1] == 'X');
  CHECK(header[2] == 'C');
  CHECK(header[3] == '1');
}

TEST_CASE("corrupt and mismatched files are rejected") {
  TempDir tmp("ckpt");
  const Parameters params = init_params(tiny_config(), 47);
  const auto good_path = tmp.path() / "good.ckpt";
  save_checkpoint(params, good_path);
  const std::string s = read_file_bytes(good_path);
  const std::vector<char> good(s.begin(), s.end());

  SUBCASE("bad magic") {
    std::vector<char> bytes = good;
    bytes[0] = 'Z';
    const auto p = tmp.path() / "magic.ckpt";
    write_bytes(p, bytes);
    CHECK(load_error(p) == ErrorCode::kCorruptFile);
  }
  SUBCASE("truncated payload") {
    for (size_t keep : {size_t{4}, size_t{10}, good.size() / 2,
                        good.size() - 1}) {
      std::vector<char> bytes(good.begin(),
                              good.begin() + static_cast<long>(keep));
      const auto p = tmp.path() / "trunc.ckpt";
      write_bytes(p, bytes);
      CHECK(load_error(p) == ErrorCode::kCorruptFile);
    }
  }
  SUBCASE("trailing garbage") {
    std::vector<char> bytes = good;
    bytes.push_back('x');
    const auto p = tmp.path() / "trail.ckpt";
    write_bytes(p, bytes);
    CHECK(load_error(p) == ErrorCode::kCorruptFile);
  }
  SUBCASE("future version") {
    std::vector<char> bytes = good;
    bytes[4] = 2;  // little-endian u32 version right after the magic
    const auto p = tmp.path() / "version.ckpt";
    write_bytes(p, bytes);
    CHECK(load_error(p) == ErrorCode::kUnsupportedFormat);
  }
  SUBCASE("missing file") {
    CHECK(load_error(tmp.path() / "absent.ckpt") == ErrorCode::kIoFailure);
  }
  SUBCASE("empty file") {
    const auto p = tmp.path() / "empty.ckpt";
    write_bytes(p, {});
    CHECK(load_error(p) == ErrorCode::kCorruptFile);
  }
}

TEST_CASE("a reloaded model reproduces the forward pass bit for bit") {
  TempDir tmp("ckpt");
  const ModelConfig cfg = tiny_config();
  const Parameters params = init_params(cfg, 53);
  const auto path = tmp.path() / "model.ckpt";
  save_checkpoint(params, path);
  const Parameters loaded = load_checkpoint(path);

  RandomGen rng(54);
  const AudioClip clip = random_clip(2048, &rng, 0.3);
  const Spectrogram mix = stft(clip, StftConfig{});
  const SourceEstimates a = run_forward(params, cfg, mix);
  const SourceEstimates b = run_forward(loaded, cfg, mix);
  REQUIRE(a.specs.size() == b.specs.size());
  for (size_t ch = 0; ch < a.specs.size(); ++ch) {
    REQUIRE(std::memcmp(a.specs[ch].data.data(), b.specs[ch].data.data(),
                        a.specs[ch].data.size() *
                            sizeof(std::complex<double>)) == 0);
  }
}
