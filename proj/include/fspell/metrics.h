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

#ifndef FSPELL_METRICS_H_
#define FSPELL_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fspell {

using ConfusionPair = std::pair<char, char>;  // (reference, hypothesis)

struct AlignmentReport {
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;
  int ref_len = 0;
  double error_rate = 0.0;  // (S + D + I) / N, not clamped
  double accuracy = 1.0;    // 1 - error_rate
  std::map<ConfusionPair, int> confusion_pairs;

  int errors() const { return substitutions + deletions + insertions; }
};

// Unit-cost minimal edit alignment. When costs tie the backtrace prefers
// substitution (or match), then deletion, then insertion. Throws
// fspell::Error for an empty reference.
AlignmentReport AlignAndScore(std::string_view reference, std::string_view hypothesis);

struct CorpusReport {
  AlignmentReport total;
  // Up to five most frequent substitutions; ties by (ref, hyp) order.
  std::vector<std::pair<ConfusionPair, int>> top_confusions;
};

// Sums counts over pairs; the error rate uses the summed reference length.
// Throws fspell::Error on an empty corpus.
CorpusReport ScoreCorpus(
    std::span<const std::pair<std::string, std::string>> pairs);

// Text layout of the error breakdown: counts and rates for deletions,
// substitutions and insertions, the top confusions and letter accuracy.
std::string FormatCorpusReport(const CorpusReport& report);

}  // namespace fspell

#endif  // FSPELL_METRICS_H_
