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

#ifndef FSPELL_LOSSES_H_
#define FSPELL_LOSSES_H_

#include <span>
#include <string>

#include <Eigen/Core>

#include "fspell/length_code.h"

namespace fspell {

// A loss value together with its gradient with respect to the direct input.
struct LossValue {
  double value = 0.0;
  Eigen::MatrixXd gradient;
  std::string diagnostic;  // set when the value is +inf

  bool finite() const { return diagnostic.empty(); }
};

// Negative log of the alignment-summed probability of `target` under
// per-frame log-probabilities `emissions` (T x classes, blank = the last
// column). Forward-backward in log space. An unreachable target yields +inf,
// a zero gradient and a diagnostic.
LossValue CtcLoss(const Eigen::MatrixXd& emissions, std::span<const int> target);
LossValue CtcLoss(const Eigen::MatrixXd& emissions, std::span<const int> target,
                  int blank);

// Smallest frame count that admits an alignment: one frame per letter plus a
// blank between each pair of equal neighbours.
int CtcMinimumFrames(std::span<const int> target);

// 0.5 * squared distance between `prediction` (1x2) and the encoded length.
LossValue LengthMse(const Eigen::MatrixXd& prediction, int target_length);

// Mean over rows of -logprobs(i, target_classes[i]). Throws fspell::Error when
// the row count does not match.
LossValue CrossEntropy(const Eigen::MatrixXd& logprobs,
                       std::span<const int> target_classes);

struct LossBreakdown {
  double ctc = 0.0;
  double mse = 0.0;
  double ce = 0.0;
  double total = 0.0;
  double lambda = 5.0;
  bool skip = false;  // infinite CTC; the example should not be applied
};

LossBreakdown TotalLoss(double ctc, double ce, double mse, double lambda);

}  // namespace fspell

#endif  // FSPELL_LOSSES_H_
