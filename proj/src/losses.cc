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

#include "fspell/losses.h"

#include <cmath>
#include <limits>
#include <vector>

#include "fspell/common.h"

namespace fspell {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

int CtcMinimumFrames(std::span<const int> target) {
  int frames = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) {
    frames += target[i] == target[i - 1];
  }
  return frames;
}

LossValue CtcLoss(const Eigen::MatrixXd& emissions, std::span<const int> target) {
  return CtcLoss(emissions, target, static_cast<int>(emissions.cols()) - 1);
}

LossValue CtcLoss(const Eigen::MatrixXd& emissions, std::span<const int> target,
                  int blank) {
  const int frames = static_cast<int>(emissions.rows());
  const int classes = static_cast<int>(emissions.cols());
  if (blank < 0 || blank >= classes) Fail("ctc: blank id {} out of range", blank);
  for (int id : target) {
    if (id < 0 || id >= classes || id == blank) {
      Fail("ctc: target id {} is not a letter", id);
    }
  }
  LossValue result;
  result.gradient = Eigen::MatrixXd::Zero(frames, classes);
  const int needed = CtcMinimumFrames(target);
  if (frames < needed) {
    result.value = std::numeric_limits<double>::infinity();
    result.diagnostic = fmt::format(
        "target of {} letters needs at least {} frames, got {}", target.size(),
        needed, frames);
    return result;
  }

  // Blank-interleaved target: blank, w1, blank, w2, ..., wU, blank.
  const int states = 2 * static_cast<int>(target.size()) + 1;
  std::vector<int> label(states, blank);
  for (std::size_t i = 0; i < target.size(); ++i) label[2 * i + 1] = target[i];
  auto can_skip = [&](int s) {
    return s >= 2 && label[s] != blank && label[s] != label[s - 2];
  };

  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(frames, states, kNegInf);
  alpha(0, 0) = emissions(0, label[0]);
  if (states > 1) alpha(0, 1) = emissions(0, label[1]);
  for (int t = 1; t < frames; ++t) {
    for (int s = 0; s < states; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, alpha(t - 1, s - 1));
      if (can_skip(s)) acc = LogAdd(acc, alpha(t - 1, s - 2));
      if (acc != kNegInf) alpha(t, s) = acc + emissions(t, label[s]);
    }
  }
  double log_likelihood = alpha(frames - 1, states - 1);
  if (states > 1) log_likelihood = LogAdd(log_likelihood, alpha(frames - 1, states - 2));
  if (log_likelihood == kNegInf) {
    result.value = std::numeric_limits<double>::infinity();
    result.diagnostic = "all alignments have zero probability";
    return result;
  }

  // beta(t, s): log-probability of frames t+1.. given state s at frame t.
  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(frames, states, kNegInf);
  beta(frames - 1, states - 1) = 0.0;
  if (states > 1) beta(frames - 1, states - 2) = 0.0;
  for (int t = frames - 2; t >= 0; --t) {
    for (int s = 0; s < states; ++s) {
      double acc = beta(t + 1, s) + emissions(t + 1, label[s]);
      if (s + 1 < states) {
        acc = LogAdd(acc, beta(t + 1, s + 1) + emissions(t + 1, label[s + 1]));
      }
      if (s + 2 < states && can_skip(s + 2)) {
        acc = LogAdd(acc, beta(t + 1, s + 2) + emissions(t + 1, label[s + 2]));
      }
      beta(t, s) = acc;
    }
  }

  // d(-log p)/d emissions(t, k) = -posterior occupancy of class k at t.
  Eigen::MatrixXd occupancy = Eigen::MatrixXd::Constant(frames, classes, kNegInf);
  for (int t = 0; t < frames; ++t) {
    for (int s = 0; s < states; ++s) {
      occupancy(t, label[s]) =
          LogAdd(occupancy(t, label[s]), alpha(t, s) + beta(t, s));
    }
  }
  result.value = -log_likelihood;
  result.gradient = -(occupancy.array() - log_likelihood).exp().matrix();
  return result;
}

LossValue LengthMse(const Eigen::MatrixXd& prediction, int target_length) {
  if (prediction.rows() != 1 || prediction.cols() != 2) {
    Fail("length prediction must be 1x2, got {}x{}", prediction.rows(),
         prediction.cols());
  }
  const LengthVector truth = EncodeLength(target_length);
  LossValue result;
  result.gradient.resize(1, 2);
  for (int j = 0; j < 2; ++j) {
    const double diff = prediction(0, j) - truth[j];
    result.value += 0.5 * diff * diff;
    result.gradient(0, j) = diff;
  }
  return result;
}

LossValue CrossEntropy(const Eigen::MatrixXd& logprobs,
                       std::span<const int> target_classes) {
  const auto rows = static_cast<std::size_t>(logprobs.rows());
  if (rows != target_classes.size() || rows == 0) {
    Fail("cross entropy: {} rows for {} targets", rows, target_classes.size());
  }
  LossValue result;
  result.gradient = Eigen::MatrixXd::Zero(logprobs.rows(), logprobs.cols());
  const double weight = 1.0 / static_cast<double>(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const int k = target_classes[i];
    if (k < 0 || k >= logprobs.cols()) Fail("cross entropy: class {} out of range", k);
    const auto r = static_cast<Eigen::Index>(i);
    result.value -= weight * logprobs(r, k);
    result.gradient(r, k) = -weight;
  }
  return result;
}

LossBreakdown TotalLoss(double ctc, double ce, double mse, double lambda) {
  LossBreakdown loss;
  loss.ctc = ctc;
  loss.ce = ce;
  loss.mse = mse;
  loss.lambda = lambda;
  loss.total = lambda * ctc + ce + mse;
  loss.skip = !std::isfinite(loss.total);
  return loss;
}

}  // namespace fspell
