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

// Brute-force reference implementations used only by the tests.

#ifndef FSPELL_TESTS_ORACLES_H_
#define FSPELL_TESTS_ORACLES_H_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fspell::testing {

// Random T x C matrix whose rows are log-probability distributions.
inline Eigen::MatrixXd RandomLogProbs(int rows, int cols, std::mt19937_64& rng,
                                      double spread = 2.0) {
  std::normal_distribution<double> normal(0.0, spread);
  Eigen::MatrixXd out(rows, cols);
  for (int t = 0; t < rows; ++t) {
    double max = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cols; ++c) {
      out(t, c) = normal(rng);
      max = std::max(max, out(t, c));
    }
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) sum += std::exp(out(t, c) - max);
    out.row(t).array() -= max + std::log(sum);
  }
  return out;
}

// Calls f(path) for every path in {0..classes-1}^length.
template <typename F>
void ForEachPath(int length, int classes, F&& f) {
  std::vector<int> path(length, 0);
  while (true) {
    f(path);
    int i = length - 1;
    while (i >= 0 && ++path[i] == classes) path[i--] = 0;
    if (i < 0) return;
  }
}

inline std::vector<int> Collapse(const std::vector<int>& path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int c : path) {
    if (c != prev && c != blank) out.push_back(c);
    prev = c;
  }
  return out;
}

// Probability mass of every labeling, summed over all T-frame paths.
inline std::map<std::vector<int>, double> LabelingMass(const Eigen::MatrixXd& logprobs,
                                                       int blank) {
  std::map<std::vector<int>, double> mass;
  ForEachPath(static_cast<int>(logprobs.rows()), static_cast<int>(logprobs.cols()),
              [&](const std::vector<int>& path) {
                double logp = 0.0;
                for (std::size_t t = 0; t < path.size(); ++t) logp += logprobs(t, path[t]);
                mass[Collapse(path, blank)] += std::exp(logp);
              });
  return mass;
}

// -log of the alignment-summed probability of `target`, by enumeration.
inline double BruteForceCtc(const Eigen::MatrixXd& logprobs, const std::vector<int>& target,
                            int blank) {
  double total = 0.0;
  ForEachPath(static_cast<int>(logprobs.rows()), static_cast<int>(logprobs.cols()),
              [&](const std::vector<int>& path) {
                if (Collapse(path, blank) != target) return;
                double logp = 0.0;
                for (std::size_t t = 0; t < path.size(); ++t) logp += logprobs(t, path[t]);
                total += std::exp(logp);
              });
  return total > 0.0 ? -std::log(total) : std::numeric_limits<double>::infinity();
}

// Plain two-row Levenshtein distance.
inline int Levenshtein(std::string_view a, std::string_view b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::string RandomWord(std::mt19937_64& rng, int min_len, int max_len,
                              std::string_view alphabet) {
  std::uniform_int_distribution<int> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out(len(rng), ' ');
  for (char& c : out) c = alphabet[pick(rng)];
  return out;
}

// Fourth-order central difference of f at 0.
template <typename F>
double CentralDifference(F&& f, double h) {
  return (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h);
}

// Largest relative difference between an analytic and a numeric derivative.
inline double RelativeError(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

}  // namespace fspell::testing

#endif  // FSPELL_TESTS_ORACLES_H_
