// src/audio-io.cc

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

#include "audio-io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.h"
#include "json.hpp"

namespace mixenh {

namespace fs = std::filesystem;

namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

struct WavLayout {
  uint16_t format_tag = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
  size_t data_offset = 0;
  size_t data_bytes = 0;
};

// Walks the RIFF chunk list and locates "fmt " and "data".
WavLayout parse_wav(const std::vector<unsigned char>& bytes,
                    const std::string& name) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kCorruptFile, name + ": not a RIFF/WAVE file");
  }
  WavLayout layout;
  bool have_fmt = false, have_data = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    uint32_t chunk_size = read_u32(hdr + 4);
    size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw Error(ErrorCode::kCorruptFile, name + ": truncated chunk");
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw Error(ErrorCode::kCorruptFile, name + ": short fmt chunk");
      }
      const unsigned char* f = bytes.data() + body;
      layout.format_tag = read_u16(f);
      layout.channels = read_u16(f + 2);
      layout.sample_rate = read_u32(f + 4);
      layout.bits_per_sample = read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      layout.data_offset = body;
      layout.data_bytes = chunk_size;
      have_data = true;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word aligned
  }
  if (!have_fmt || !have_data) {
    throw Error(ErrorCode::kCorruptFile, name + ": missing fmt or data chunk");
  }
  return layout;
}

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

void check_supported(const WavLayout& l, const std::string& name) {
  if (l.format_tag != 1 || l.bits_per_sample != 16 || l.channels != 1 ||
      l.sample_rate != kSampleRate) {
    throw Error(ErrorCode::kUnsupportedFormat,
                name + ": need mono 16-bit PCM at 16000 Hz (got tag=" +
                    std::to_string(l.format_tag) +
                    " ch=" + std::to_string(l.channels) +
                    " rate=" + std::to_string(l.sample_rate) +
                    " bits=" + std::to_string(l.bits_per_sample) + ")");
  }
}

}  // namespace

AudioClip read_wav(const fs::path& path) {
  std::vector<unsigned char> bytes = slurp(path);
  WavLayout layout = parse_wav(bytes, path.string());
  check_supported(layout, path.string());
  if (layout.data_bytes % 2 != 0) {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": odd data size");
  }
  size_t n = layout.data_bytes / 2;
  AudioClip clip;
  clip.sample_rate = kSampleRate;
  clip.samples.resize(n);
  const unsigned char* d = bytes.data() + layout.data_offset;
  for (size_t i = 0; i < n; ++i) {
    int16_t v = static_cast<int16_t>(d[2 * i] | (d[2 * i + 1] << 8));
    clip.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return clip;
}

void write_wav(const AudioClip& clip, const fs::path& path) {
  const uint32_t n = static_cast<uint32_t>(clip.samples.size());
  const uint32_t data_bytes = 2 * n;
  const uint32_t rate = static_cast<uint32_t>(clip.sample_rate);
  const uint32_t byte_rate = rate * 2;

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  auto put_u32 = [&out](uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
  };
  auto put_u16 = [&out](uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
  };
  auto put_tag = [&out](const char* t) {
    out.insert(out.end(), t, t + 4);
  };

  put_tag("RIFF");
  put_u32(36 + data_bytes);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(byte_rate);
  put_u16(2);   // block align
  put_u16(16);  // bits
  put_tag("data");
  put_u32(data_bytes);

  for (double s : clip.samples) {
    double v = std::clamp(s, -1.0, 1.0);
    long q = std::lround(v * 32768.0);  // half away from zero
    q = std::clamp(q, -32768L, 32767L);
    uint16_t u = static_cast<uint16_t>(static_cast<int16_t>(q));
    out.push_back(u & 0xff);
    out.push_back((u >> 8) & 0xff);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::kIoFailure, "cannot open for write: " + path.string());
  }
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
  }
}

WavInfo read_wav_info(const fs::path& path) {
  std::vector<unsigned char> bytes = slurp(path);
  WavLayout layout = parse_wav(bytes, path.string());
  check_supported(layout, path.string());
  WavInfo info;
  info.sample_rate = layout.sample_rate;
  info.num_samples = layout.data_bytes / 2;
  return info;
}

const char* kind_name(ClipKind kind) {
  switch (kind) {
    case ClipKind::kClean: return "clean";
    case ClipKind::kNoise: return "noise";
    case ClipKind::kNoisy: return "noisy";
  }
  return "clean";
}

ClipKind kind_from_name(const std::string& name) {
  if (name == "clean") return ClipKind::kClean;
  if (name == "noise") return ClipKind::kNoise;
  if (name == "noisy") return ClipKind::kNoisy;
  throw Error(ErrorCode::kConfigError, "unknown clip kind \"" + name + "\"");
}

std::vector<const ManifestEntry*> Manifest::by_kind(ClipKind kind) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

void Manifest::append(const Manifest& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

ManifestBuildResult build_manifest(const fs::path& root, ClipKind kind) {
  if (!fs::exists(root) || !fs::is_directory(root)) {
    throw Error(ErrorCode::kInvalidArgument,
                "not a directory: " + root.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });

  ManifestBuildResult result;
  for (const auto& p : files) {
    try {
      WavInfo info = read_wav_info(p);
      ManifestEntry e;
      e.path = fs::absolute(p).lexically_normal().generic_string();
      e.kind = kind;
      e.duration_s = static_cast<double>(info.num_samples) / info.sample_rate;
      result.manifest.entries.push_back(std::move(e));
    } catch (const Error&) {
      ++result.skipped;
    }
  }
  return result;
}

std::string serialize_manifest(const Manifest& manifest,
                               const fs::path& base_dir) {
  std::string out;
  for (const auto& e : manifest.entries) {
    fs::path p(e.path);
    fs::path rel = p.lexically_proximate(base_dir);
    std::string text = rel.empty() || rel.generic_string().starts_with("..")
                           ? p.generic_string()
                           : rel.generic_string();
    nlohmann::json j;
    j["path"] = text;
    j["kind"] = kind_name(e.kind);
    j["duration_s"] = e.duration_s;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_manifest(const Manifest& manifest, const fs::path& out_path) {
  fs::path base = fs::absolute(out_path).parent_path();
  std::string text = serialize_manifest(manifest, base);
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::kIoFailure,
                "cannot open for write: " + out_path.string());
  }
  f << text;
  if (!f) {
    throw Error(ErrorCode::kIoFailure, "write failed: " + out_path.string());
  }
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  fs::path base = fs::absolute(path).parent_path();
  Manifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptFile,
                  path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
    if (!j.is_object() || !j.contains("path") || !j.contains("kind") ||
        !j.contains("duration_s")) {
      throw Error(ErrorCode::kCorruptFile,
                  path.string() + ":" + std::to_string(line_no) +
                      ": manifest line missing required field");
    }
    ManifestEntry e;
    fs::path p(j.at("path").get<std::string>());
    if (!p.is_absolute()) p = base / p;
    e.path = p.lexically_normal().generic_string();
    e.kind = kind_from_name(j.at("kind").get<std::string>());
    e.duration_s = j.at("duration_s").get<double>();
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

}  // namespace mixenh
