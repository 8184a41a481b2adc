// src/checkpoint.cc

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

#include "checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "error.h"

namespace mixenh {
namespace {

constexpr char kMagic[4] = {'M', 'X', 'C', '1'};
constexpr uint32_t kVersion = 1;

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

void put_f64(std::string& out, double v) {
  const uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  Reader(const std::string& buf, const std::string& path)
      : buf_(buf), path_(path) {}

  void bytes(void* dst, size_t n) {
    if (pos_ + n > buf_.size()) {
      throw Error(ErrorCode::kCorruptFile, path_ + ": truncated checkpoint");
    }
    std::memcpy(dst, buf_.data() + pos_, n);
    pos_ += n;
  }
  uint16_t u16() {
    unsigned char b[2];
    bytes(b, 2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
  }
  uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) |
           (static_cast<uint32_t>(b[3]) << 24);
  }
  double f64() {
    unsigned char b[8];
    bytes(b, 8);
    uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
    return std::bit_cast<double>(bits);
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  const std::string& buf_;
  std::string path_;
  size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const Parameters& params,
                     const std::filesystem::path& path) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(params.values.size()));
  for (const auto& [name, tensor] : params.values) {
    if (name.size() > std::numeric_limits<uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "checkpoint: parameter name too long: " + name);
    }
    put_u16(out, static_cast<uint16_t>(name.size()));
    out.append(name);
    out.push_back(static_cast<char>(tensor.shape.size()));  // rank u8
    for (int d : tensor.shape) put_u32(out, static_cast<uint32_t>(d));
    for (double v : tensor.data) put_f64(out, v);
  }

  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) {
    throw Error(ErrorCode::kIoFailure,
                "checkpoint: cannot open " + path.string() + " for writing");
  }
  stream.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!stream) {
    throw Error(ErrorCode::kIoFailure,
                "checkpoint: short write to " + path.string());
  }
}

Parameters load_checkpoint(const std::filesystem::path& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw Error(ErrorCode::kIoFailure,
                "checkpoint: cannot open " + path.string());
  }
  std::string buf((std::istreambuf_iterator<char>(stream)),
                  std::istreambuf_iterator<char>());
  Reader in(buf, path.string());

  char magic[4];
  in.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::kCorruptFile,
                path.string() + ": not a checkpoint file (bad magic)");
  }
  const uint32_t version = in.u32();
  if (version != kVersion) {
    throw Error(ErrorCode::kUnsupportedFormat,
                path.string() + ": checkpoint version " +
                    std::to_string(version) + " unsupported");
  }
  const uint32_t count = in.u32();

  Parameters params;
  for (uint32_t t = 0; t < count; ++t) {
    const uint16_t name_len = in.u16();
    std::string name(name_len, '\0');
    in.bytes(name.data(), name_len);
    unsigned char rank;
    in.bytes(&rank, 1);
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(in.u32());
    Tensor tensor(shape);
    for (double& v : tensor.data) v = in.f64();
    if (!params.values.emplace(std::move(name), std::move(tensor)).second) {
      throw Error(ErrorCode::kCorruptFile,
                  path.string() + ": duplicate tensor name");
    }
  }
  if (!in.done()) {
    throw Error(ErrorCode::kCorruptFile,
                path.string() + ": trailing bytes after last tensor");
  }
  return params;
}

}  // namespace mixenh
