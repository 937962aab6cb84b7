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

#include "fspell/pose_prep.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "fspell/common.h"

namespace fspell {

double HandVariability(const LandmarkSequence& sequence, HandSide side) {
  double total = 0.0;
  for (std::size_t t = 1; t < sequence.frames.size(); ++t) {
    const auto& prev = sequence.frames[t - 1].hand(side);
    const auto& cur = sequence.frames[t].hand(side);
    if (!prev || !cur) continue;
    for (int j = 0; j < kNumHandJoints; ++j) {
      total += std::hypot((*cur)[j].x - (*prev)[j].x, (*cur)[j].y - (*prev)[j].y);
    }
  }
  return total;
}

HandSide PickByVariability(const LandmarkSequence& sequence) {
  double left = HandVariability(sequence, HandSide::kLeft);
  double right = HandVariability(sequence, HandSide::kRight);
  return left > right ? HandSide::kLeft : HandSide::kRight;
}

HandSide SignerHistory::AppendAndVote(const std::string& signer_id,
                                      HandSide pick) {
  auto& picks = picks_[signer_id];
  picks.push_back(pick);
  auto left = std::count(picks.begin(), picks.end(), HandSide::kLeft);
  auto right = static_cast<std::ptrdiff_t>(picks.size()) - left;
  if (left == right) return pick;
  return left > right ? HandSide::kLeft : HandSide::kRight;
}

const std::vector<HandSide>& SignerHistory::picks(
    const std::string& signer_id) const {
  static const std::vector<HandSide> kEmpty;
  auto it = picks_.find(signer_id);
  return it == picks_.end() ? kEmpty : it->second;
}

HandDecision DetectSigningHand(const LandmarkSequence& sequence,
                               SignerHistory& history) {
  HandDecision decision;
  decision.per_video = PickByVariability(sequence);
  decision.voted = history.AppendAndVote(sequence.signer_id, decision.per_video);
  return decision;
}

std::vector<double> MirrorFrame(std::span<const double> xs) {
  std::vector<double> out(xs.begin(), xs.end());
  if (out.empty()) return out;
  const double max_x = *std::max_element(out.begin(), out.end());
  for (double& x : out) x = -x + max_x;
  return out;
}

bool NormalizeHand(const Hand& hand, HandSide side,
                   Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) {
  std::array<double, kNumHandJoints> xs;
  std::array<double, kNumHandJoints> ys;
  const double origin_x = hand[0].x;
  const double origin_y = hand[0].y;
  for (int j = 0; j < kNumHandJoints; ++j) {
    xs[j] = hand[j].x - origin_x;
    ys[j] = hand[j].y - origin_y;
  }
  if (side == HandSide::kLeft) {
    const double max_x = *std::max_element(xs.begin(), xs.end());
    for (double& x : xs) x = -x + max_x;
  }
  const double max_x = *std::max_element(xs.begin(), xs.end());
  const double max_y = *std::max_element(ys.begin(), ys.end());
  if (!(max_x > 0.0) || !(max_y > 0.0)) return false;
  for (int j = 0; j < kNumHandJoints; ++j) {
    out[2 * j] = xs[j] / max_x;
    out[2 * j + 1] = ys[j] / max_y;
  }
  const double mean = out.sum() / kNumFeatures;
  out.array() -= mean;
  const double max_abs = out.cwiseAbs().maxCoeff();
  if (!(max_abs > 0.0)) return false;
  out /= 2.0 * max_abs;
  return true;
}

PoseSequence NormalizeSequence(const LandmarkSequence& sequence, HandSide side) {
  Eigen::MatrixXd features(static_cast<Eigen::Index>(sequence.frames.size()),
                           kNumFeatures);
  Eigen::Index kept = 0;
  int degenerate = 0;
  for (const HandFrame& frame : sequence.frames) {
    const auto& hand = frame.hand(side);
    if (!hand) continue;
    if (NormalizeHand(*hand, side, features.row(kept))) {
      ++kept;
    } else {
      ++degenerate;
    }
  }
  if (degenerate > 0) {
    Warn("video '{}': dropped {} degenerate frame(s) with zero extent",
         sequence.video_id, degenerate);
  }
  if (kept == 0) {
    Fail("video '{}': empty after filtering ({} hand never usable)",
         sequence.video_id, HandSideName(side));
  }
  PoseSequence pose;
  pose.features = features.topRows(kept);
  pose.source_id = sequence.video_id;
  pose.kept_fraction =
      static_cast<double>(kept) / static_cast<double>(sequence.frames.size());
  return pose;
}

}  // namespace fspell
