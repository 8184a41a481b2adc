// src/fft.cc

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

#include "fft.h"

#include <cmath>

#include "error.h"

namespace mixenh {

namespace {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_pow2(n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "fft size must be a power of two, got " + std::to_string(n));
  }
  if (n == 1) return;

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= inv_n;
  }
}

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> a(n);
  for (size_t i = 0; i < n; ++i) a[i] = std::complex<double>(x[i], 0.0);
  fft_inplace(a, false);
  a.resize(n / 2 + 1);
  return a;
}

std::vector<double> irfft(std::span<const std::complex<double>> half, int n) {
  const size_t bins = static_cast<size_t>(n) / 2 + 1;
  if (half.size() != bins) {
    throw Error(ErrorCode::kShapeMismatch,
                "irfft: expected " + std::to_string(bins) + " bins, got " +
                    std::to_string(half.size()));
  }
  std::vector<std::complex<double>> a(static_cast<size_t>(n));
  for (size_t f = 0; f < bins; ++f) a[f] = half[f];
  for (size_t f = bins; f < static_cast<size_t>(n); ++f) {
    a[f] = std::conj(half[static_cast<size_t>(n) - f]);
  }
  fft_inplace(a, true);
  std::vector<double> out(static_cast<size_t>(n));
  for (size_t i = 0; i < out.size(); ++i) out[i] = a[i].real();
  return out;
}

}  // namespace mixenh
