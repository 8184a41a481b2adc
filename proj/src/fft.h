// src/fft.h

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

#ifndef MIXENH_SRC_FFT_H_
#define MIXENH_SRC_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace mixenh {

// Iterative radix-2 FFT, power-of-two sizes only. No global state, so calls
// are safe from any thread. The inverse includes the 1/n factor.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

// Real input -> one-sided spectrum of n/2 + 1 bins (unnormalized DFT).
std::vector<std::complex<double>> rfft(std::span<const double> x);

// One-sided spectrum of n/2 + 1 bins -> real signal of length n, rebuilding
// the negative frequencies by Hermitian symmetry.
std::vector<double> irfft(std::span<const std::complex<double>> half, int n);

}  // namespace mixenh

#endif  // MIXENH_SRC_FFT_H_
