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

#ifndef FSPELL_POSE_PREP_H_
#define FSPELL_POSE_PREP_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fspell/landmarks.h"

namespace fspell {

inline constexpr int kNumFeatures = 2 * kNumHandJoints;

// Model-ready features: T' rows of (x0,y0,...,x20,y20), every entry in
// [-0.5, 0.5].
struct PoseSequence {
  Eigen::MatrixXd features;
  std::string source_id;
  double kept_fraction = 0.0;

  int num_frames() const { return static_cast<int>(features.rows()); }
};

// Sum over consecutive frame pairs (both with the hand present) of the
// Euclidean displacement of every joint. Zero when the hand never appears
// twice in a row.
double HandVariability(const LandmarkSequence& sequence, HandSide side);

// Larger variability wins; ties go to the right hand.
HandSide PickByVariability(const LandmarkSequence& sequence);

// Per-signer record of per-video hand picks. Append-only. Not thread-safe:
// callers serialize access.
class SignerHistory {
 public:
  // Appends `pick` for `signer_id` and returns the majority over the signer's
  // history including the new pick. A tied vote keeps `pick`.
  HandSide AppendAndVote(const std::string& signer_id, HandSide pick);

  const std::vector<HandSide>& picks(const std::string& signer_id) const;

 private:
  std::map<std::string, std::vector<HandSide>> picks_;
};

struct HandDecision {
  HandSide per_video;
  HandSide voted;
};

HandDecision DetectSigningHand(const LandmarkSequence& sequence,
                               SignerHistory& history);

// x -> max(X) - x. Reverses x order and preserves pairwise distances.
std::vector<double> MirrorFrame(std::span<const double> xs);

// Per-frame pipeline on the chosen hand: drop absent frames, shift to the
// wrist, mirror if left, scale the bounding box to 1x1, then center all 42
// values and divide by twice their max magnitude. Degenerate frames are
// dropped with a warning; throws fspell::Error if nothing is left.
PoseSequence NormalizeSequence(const LandmarkSequence& sequence, HandSide side);

// Single frame of the same pipeline. Returns false for a degenerate frame.
bool NormalizeHand(const Hand& hand, HandSide side,
                   Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out);

}  // namespace fspell

#endif  // FSPELL_POSE_PREP_H_
