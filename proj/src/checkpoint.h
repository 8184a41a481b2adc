// src/checkpoint.h

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

#ifndef MIXENH_SRC_CHECKPOINT_H_
#define MIXENH_SRC_CHECKPOINT_H_

#include <filesystem>

#include "model.h"

namespace mixenh {

// Binary parameter file: magic "MXC1", version u32, tensor count u32, then
// per tensor: name length u16 + UTF-8 name, rank u8, dims as u32 each, raw
// little-endian f64 data. Tensors are stored in map order, so the bytes are
// a pure function of the parameter values.
void save_checkpoint(const Parameters& params,
                     const std::filesystem::path& path);

// Inverse of save_checkpoint; byte-exact round trip. Throws CorruptFile on
// a bad magic/truncated payload and UnsupportedFormat on a version mismatch.
Parameters load_checkpoint(const std::filesystem::path& path);

}  // namespace mixenh

#endif  // MIXENH_SRC_CHECKPOINT_H_
