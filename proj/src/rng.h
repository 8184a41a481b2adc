// src/rng.h

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

#ifndef MIXENH_SRC_RNG_H_
#define MIXENH_SRC_RNG_H_

#include <cstdint>
#include <random>

namespace mixenh {

// Deterministic random source. The engine is std::mt19937_64 (bit-exact by
// the standard); all value transforms are done here rather than with
// std::*_distribution so that streams are reproducible across library
// implementations.
class RandomGen {
 public:
  explicit RandomGen(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Index in [0, n). Modulo bias is below 2^-50 for any realistic n.
  size_t below(size_t n) { return static_cast<size_t>(next_u64() % n); }

  // Standard normal via Box-Muller, one spare cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 step; used to derive independent sub-seeds from one master seed.
uint64_t splitmix64(uint64_t x);

// Derives a stream seed from (seed, tag, index).
uint64_t derive_seed(uint64_t seed, uint64_t tag, uint64_t index);

}  // namespace mixenh

#endif  // MIXENH_SRC_RNG_H_
