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

#ifndef FSPELL_LENGTH_CODE_H_
#define FSPELL_LENGTH_CODE_H_

#include <array>

namespace fspell {

inline constexpr int kMaxWordLength = 30;

using LengthVector = std::array<double, 2>;  // (sin, cos)

// Word length as a point on the unit circle at angle 2*pi*(L/30 - 0.5).
// Lengths outside [1,30] are clamped to 30 with a warning.
LengthVector EncodeLength(int length);

struct DecodedLength {
  int length = 0;            // nearest encoded length in [1,30]
  double continuous = 0.0;   // 30 * (theta / 2pi + 0.5), in (0, 30]
};

// Inverts EncodeLength through atan2. Throws fspell::Error for the zero
// vector.
DecodedLength DecodeLength(const LengthVector& v);

}  // namespace fspell

#endif  // FSPELL_LENGTH_CODE_H_
