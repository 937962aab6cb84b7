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

#include "fspell/length_code.h"

#include <cmath>
#include <numbers>

#include "fspell/common.h"

namespace fspell {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double LengthAngle(int length) {
  return kTwoPi * (static_cast<double>(length) / kMaxWordLength - 0.5);
}
}  // namespace

LengthVector EncodeLength(int length) {
  if (length < 1 || length > kMaxWordLength) {
    Warn("word length {} outside [1,{}], clamped to {}", length, kMaxWordLength,
         kMaxWordLength);
    length = kMaxWordLength;
  }
  const double angle = LengthAngle(length);
  return {std::sin(angle), std::cos(angle)};
}

DecodedLength DecodeLength(const LengthVector& v) {
  if (v[0] == 0.0 && v[1] == 0.0) Fail("undefined angle: zero length vector");
  if (!std::isfinite(v[0]) || !std::isfinite(v[1])) {
    Fail("undefined angle: non-finite length vector");
  }
  const double theta = std::atan2(v[0], v[1]);
  DecodedLength decoded;
  decoded.continuous = kMaxWordLength * (theta / kTwoPi + 0.5);
  double best = INFINITY;
  for (int length = 1; length <= kMaxWordLength; ++length) {
    double diff = std::remainder(theta - LengthAngle(length), kTwoPi);
    if (std::abs(diff) < best) {
      best = std::abs(diff);
      decoded.length = length;
    }
  }
  return decoded;
}

}  // namespace fspell
