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

#ifndef FSPELL_LANDMARKS_H_
#define FSPELL_LANDMARKS_H_

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fspell/vocabulary.h"

namespace fspell {

inline constexpr int kNumHandJoints = 21;

struct Landmark {
  double x = 0.0;  // normalized image coordinate, nominally [0,1]
  double y = 0.0;
  double confidence = 0.0;  // [0,1]

  bool operator==(const Landmark&) const = default;
};

using Hand = std::array<Landmark, kNumHandJoints>;

enum class HandSide { kLeft, kRight };

std::string_view HandSideName(HandSide side);

struct HandFrame {
  std::optional<Hand> left;
  std::optional<Hand> right;

  const std::optional<Hand>& hand(HandSide side) const {
    return side == HandSide::kLeft ? left : right;
  }
  bool empty() const { return !left && !right; }
  bool operator==(const HandFrame&) const = default;
};

// Keypoints of one video. Parsed values are immutable in practice and safe to
// share across threads.
struct LandmarkSequence {
  std::string video_id;
  std::string signer_id;
  std::vector<HandFrame> frames;
  std::optional<std::string> label;

  bool operator==(const LandmarkSequence&) const = default;
};

struct ParseOptions {
  Vocabulary vocabulary;
  // When set, a hand with a landmark count other than 21 is read as absent
  // instead of failing the whole file.
  bool partial_hands_as_absent = false;
};

// JSON Lines, one sequence per line:
//   {"video_id": str, "signer_id": str, "label": str|null,
//    "frames": [{"left": [[x,y,conf]x21]|null, "right": ...}]}
// A landmark may also carry z as [x,y,z,conf]; z is discarded.
// Throws fspell::Error naming the offending line.
std::vector<LandmarkSequence> ParseLandmarkFile(std::istream& in,
                                                const ParseOptions& options = {});
std::vector<LandmarkSequence> ParseLandmarkText(std::string_view text,
                                                const ParseOptions& options = {});

// Deterministic field order; doubles written with 17 significant digits.
void WriteLandmarkFile(std::ostream& out,
                       std::span<const LandmarkSequence> sequences);
std::string WriteLandmarkText(std::span<const LandmarkSequence> sequences);

// Throws fspell::Error if the sequence violates a type invariant.
// Coordinates outside [0,1] only warn.
void ValidateSequence(const LandmarkSequence& sequence,
                      const Vocabulary& vocabulary);

// Fraction of frames with neither hand, bucketed into ten 10% bins:
// bucket k holds fractions in [k/10, (k+1)/10), the last bin also holds 1.0.
struct MissingPoseHistogram {
  std::array<int, 10> buckets{};
  int total = 0;
};

MissingPoseHistogram MissingPoseStats(std::span<const LandmarkSequence> sequences);

}  // namespace fspell

#endif  // FSPELL_LANDMARKS_H_
