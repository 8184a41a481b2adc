// src/tensor.h

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

#ifndef MIXENH_SRC_TENSOR_H_
#define MIXENH_SRC_TENSOR_H_

#include <cstdint>
#include <vector>

namespace mixenh {

// Dense row-major real array (double). The last dimension is contiguous;
// all model code keeps time frames in the last dimension.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(numel_of(shape)), 0.0);
  }

  static int64_t numel_of(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  // 3-D accessors, shape {C, F, K}.
  double& at3(int c, int f, int k) {
    return data[(static_cast<size_t>(c) * shape[1] + f) * shape[2] + k];
  }
  const double& at3(int c, int f, int k) const {
    return data[(static_cast<size_t>(c) * shape[1] + f) * shape[2] + k];
  }
};

bool all_finite(const Tensor& t);

}  // namespace mixenh

#endif  // MIXENH_SRC_TENSOR_H_
