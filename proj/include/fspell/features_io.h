// Copyright 2026 The fspell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FSPELL_FEATURES_IO_H_
#define FSPELL_FEATURES_IO_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fspell/decode.h"
#include "fspell/pose_prep.h"

namespace fspell {

// One line of the normalized-features file:
//   {"source_id": str, "label": str|null, "kept_fraction": f,
//    "features": [[f x 42] x T']}
struct FeatureRecord {
  PoseSequence pose;
  std::optional<std::string> label;
};

void WriteFeatureFile(std::ostream& out, std::span<const FeatureRecord> records);
// Throws fspell::Error naming the line on malformed input.
std::vector<FeatureRecord> ReadFeatureFile(std::istream& in);

// Hand decision report, one JSON line per video.
struct HandReportRow {
  std::string video_id;
  std::string signer_id;
  HandSide per_video = HandSide::kRight;
  HandSide voted = HandSide::kRight;
  HandSide used = HandSide::kRight;  // differs from voted only on fallback
  double kept_fraction = 0.0;        // 0 when the video was skipped
};

void WriteHandReport(std::ostream& out, std::span<const HandReportRow> rows);

// One line of decode output:
//   {"source_id": str, "prediction": str, "hypotheses": [{"letters": str,
//    "ctc_logp": f, "lm_logp": f|null, "length_penalty": f|null,
//    "combined": f|null}]}
struct PredictionRecord {
  std::string source_id;
  std::string prediction;
  std::vector<Hypothesis> hypotheses;
};

void WritePredictionFile(std::ostream& out, std::span<const PredictionRecord> records,
                         const Vocabulary& vocab);
std::vector<PredictionRecord> ReadPredictionFile(std::istream& in,
                                                 const Vocabulary& vocab);

}  // namespace fspell

#endif  // FSPELL_FEATURES_IO_H_
