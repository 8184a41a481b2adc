// tests/test-postproc.cc

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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "error.h"
#include "postproc.h"
#include "rng.h"
#include "test-util.h"

using namespace mixenh;
using mixenh::testing::make_clip;
using mixenh::testing::random_clip;

namespace {

// Gain implied by the remix output, recovered sample-wise.
double implied_gain(const AudioClip& z, const AudioClip& enhanced,
                    const AudioClip& noisy) {
  for (size_t i = 0; i < noisy.samples.size(); ++i) {
    if (std::abs(noisy.samples[i]) > 0.1) {
      return (z.samples[i] - enhanced.samples[i]) / noisy.samples[i];
    }
  }
  FAIL("no usable sample to recover the gain");
  return 0.0;
}

}  // namespace

TEST_CASE("remix hand examples") {
  const AudioClip enhanced = make_clip({0.5, -0.5, 0.5, -0.5});
  const AudioClip noisy = make_clip({0.5, 0.5, -0.5, -0.5});  // equal power

  SUBCASE("equal powers, beta 0 dB: unit gain") {
    const AudioClip z = remix(enhanced, noisy, 0.0);
    REQUIRE(z.samples.size() == 4);
    for (size_t i = 0; i < 4; ++i) {
      CHECK(z.samples[i] ==
            doctest::Approx(enhanced.samples[i] + noisy.samples[i])
                .epsilon(1e-12));
    }
    CHECK(implied_gain(z, enhanced, noisy) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("equal powers, beta 10 dB: gain 10^-0.5") {
    const AudioClip z = remix(enhanced, noisy, 10.0);
    CHECK(implied_gain(z, enhanced, noisy) ==
          doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-12));
    CHECK(implied_gain(z, enhanced, noisy) == doctest::Approx(0.31623).epsilon(1e-4));
  }
  SUBCASE("noisy equals enhanced, beta 0: doubled signal") {
    const AudioClip z = remix(enhanced, enhanced, 0.0);
    for (size_t i = 0; i < 4; ++i) {
      CHECK(z.samples[i] == doctest::Approx(2.0 * enhanced.samples[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("remix internal SNR equals beta within 1e-6 dB") {
  RandomGen rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const AudioClip enhanced = random_clip(400, &rng, 0.3);
    const AudioClip noisy = random_clip(400, &rng, 0.6);
    const double beta = -20.0 + 40.0 * rng.uniform01();
    const AudioClip z = remix(enhanced, noisy, beta);
    // snr_db(enhanced, z) measures enhanced against z - enhanced = g * noisy,
    // which is exactly the remix-internal SNR.
    REQUIRE(std::abs(snr_db(enhanced, z) - beta) <= 1e-6);
  }
}

TEST_CASE("remix gain strictly decreases in beta") {
  RandomGen rng(62);
  const AudioClip enhanced = random_clip(300, &rng, 0.4);
  const AudioClip noisy = random_clip(300, &rng, 0.4);
  double prev = std::numeric_limits<double>::infinity();
  for (double beta : {-10.0, -3.0, 0.0, 3.0, 10.0, 20.0, 40.0}) {
    const AudioClip z = remix(enhanced, noisy, beta);
    const double g = implied_gain(z, enhanced, noisy);
    CHECK(g < prev);
    CHECK(g > 0.0);
    prev = g;
  }
}

TEST_CASE("at beta 60 dB the noisy contribution vanishes") {
  RandomGen rng(63);
  const AudioClip enhanced = random_clip(500, &rng, 0.4);
  const AudioClip noisy = random_clip(500, &rng, 0.4);
  const AudioClip z = remix(enhanced, noisy, 60.0);
  const double g = implied_gain(z, enhanced, noisy);
  double max_noisy = 0.0, max_diff = 0.0;
  for (size_t i = 0; i < z.samples.size(); ++i) {
    max_noisy = std::max(max_noisy, std::abs(noisy.samples[i]));
    max_diff = std::max(max_diff, std::abs(z.samples[i] - enhanced.samples[i]));
  }
  CHECK(max_diff <= g * max_noisy + 1e-12);
  // 60 dB with comparable powers puts g near 1e-3.
  CHECK(g * max_noisy <= 1e-3 * max_noisy * 2.0);
}

TEST_CASE("snr_db hand examples") {
  const AudioClip ref = make_clip({0.5, 0.5, 0.5, 0.5});

  SUBCASE("exact reconstruction hits the +100 cap") {
    CHECK(snr_db(ref, ref) == 100.0);
  }
  SUBCASE("error power at 1/100 of the reference gives 20 dB") {
    AudioClip est = ref;
    for (double& v : est.samples) v += 0.05;  // power(e) = 0.0025 = 0.25/100
    CHECK(snr_db(ref, est) == doctest::Approx(20.0).epsilon(1e-9));
  }
  SUBCASE("doubling the reference gives 0 dB") {
    AudioClip est = ref;
    for (double& v : est.samples) v *= 2.0;
    CHECK(snr_db(ref, est) == 0.0);
  }
  SUBCASE("overwhelming error hits the -100 cap") {
    const AudioClip tiny = make_clip({1e-6, 1e-6, 1e-6, 1e-6});
    AudioClip est = tiny;
    for (double& v : est.samples) v += 1.0;
    CHECK(snr_db(tiny, est) == -100.0);
  }
}

TEST_CASE("postproc error conditions") {
  const AudioClip sig = make_clip({0.5, -0.5});
  const AudioClip silent = make_clip({0.0, 0.0});
  const AudioClip shorter = make_clip({0.5});

  auto expect_code = [](auto&& fn, ErrorCode code, const char* needle) {
    try {
      fn();
      FAIL_CHECK("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_code([&] { remix(silent, sig, 0.0); }, ErrorCode::kSilentSignal,
              "enhanced");
  expect_code([&] { remix(sig, silent, 0.0); }, ErrorCode::kSilentSignal,
              "noisy");
  expect_code([&] { remix(sig, shorter, 0.0); }, ErrorCode::kShapeMismatch,
              "length");
  expect_code(
      [&] { remix(sig, sig, std::numeric_limits<double>::quiet_NaN()); },
      ErrorCode::kConfigError, "finite");
  expect_code(
      [&] { remix(sig, sig, std::numeric_limits<double>::infinity()); },
      ErrorCode::kConfigError, "finite");
  expect_code([&] { snr_db(silent, sig); }, ErrorCode::kSilentSignal,
              "reference");
  expect_code([&] { snr_db(sig, shorter); }, ErrorCode::kShapeMismatch,
              "length");
}
