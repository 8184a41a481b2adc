// src/report.cc

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

#include "report.h"

#include <cstdio>
#include <fstream>

#include "error.h"
#include "postproc.h"

namespace mixenh {

std::vector<EvalRow> eval_snr_rows(const Manifest& clean_manifest,
                                   const std::filesystem::path& processed_dir,
                                   const std::filesystem::path& noisy_dir) {
  const auto clean_entries = clean_manifest.by_kind(ClipKind::kClean);
  if (clean_entries.empty()) {
    throw Error(ErrorCode::kWrongKind,
                "eval: manifest contains no clean entries");
  }

  std::vector<EvalRow> rows;
  rows.reserve(clean_entries.size());
  for (const ManifestEntry* entry : clean_entries) {
    const std::filesystem::path clean_path(entry->path);
    const std::filesystem::path name = clean_path.filename();
    const std::filesystem::path processed = processed_dir / name;
    const std::filesystem::path noisy = noisy_dir / name;
    if (!std::filesystem::is_regular_file(processed)) {
      throw Error(ErrorCode::kIoFailure,
                  "eval: missing processed file " + processed.string());
    }
    if (!std::filesystem::is_regular_file(noisy)) {
      throw Error(ErrorCode::kIoFailure,
                  "eval: missing noisy file " + noisy.string());
    }

    const AudioClip ref = read_wav(clean_path);
    const AudioClip est = read_wav(processed);
    const AudioClip in = read_wav(noisy);

    EvalRow row;
    row.path = entry->path;
    row.snr_in_db = snr_db(ref, in);
    row.snr_out_db = snr_db(ref, est);
    row.snri_db = row.snr_out_db - row.snr_in_db;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_eval_csv(const std::vector<EvalRow>& rows,
                    const std::filesystem::path& out_csv) {
  std::ofstream out(out_csv, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "eval: cannot write " +
                                           out_csv.string());
  }
  out << "path,snr_in_db,snr_out_db,snri_db\n";
  char buf[128];
  for (const EvalRow& row : rows) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f\n", row.snr_in_db,
                  row.snr_out_db, row.snri_db);
    out << row.path << buf;
  }
  if (!out) {
    throw Error(ErrorCode::kIoFailure, "eval: short write to " +
                                           out_csv.string());
  }
}

}  // namespace mixenh
