// src/report.h

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

#ifndef MIXENH_SRC_REPORT_H_
#define MIXENH_SRC_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "audio-io.h"

namespace mixenh {

// One evaluated utterance: SNR against the clean reference before (noisy)
// and after (processed) enhancement, and the improvement.
struct EvalRow {
  std::string path;  // clean reference path, as recorded in the manifest
  double snr_in_db = 0.0;
  double snr_out_db = 0.0;
  double snri_db = 0.0;
};

// For every clean entry in the manifest, finds the same-named file under
// processed_dir and noisy_dir and scores it. Throws IoFailure when a
// counterpart file is missing, WrongKind when the manifest has no clean
// entries.
std::vector<EvalRow> eval_snr_rows(const Manifest& clean_manifest,
                                   const std::filesystem::path& processed_dir,
                                   const std::filesystem::path& noisy_dir);

// CSV with the exact header "path,snr_in_db,snr_out_db,snri_db" and one
// row per entry, numbers at fixed 6-decimal precision.
void write_eval_csv(const std::vector<EvalRow>& rows,
                    const std::filesystem::path& out_csv);

}  // namespace mixenh

#endif  // MIXENH_SRC_REPORT_H_
