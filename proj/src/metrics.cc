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

#include "fspell/metrics.h"

#include <algorithm>
#include <vector>

#include "fspell/common.h"

namespace fspell {

AlignmentReport AlignAndScore(std::string_view reference, std::string_view hypothesis) {
  if (reference.empty()) Fail("N must be > 0: empty reference");
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = cost[i - 1][j - 1] + (reference[i - 1] != hypothesis[j - 1]);
      cost[i][j] = std::min({diag, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
    }
  }

  AlignmentReport report;
  report.ref_len = static_cast<int>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (reference[i - 1] != hypothesis[j - 1])) {
      if (reference[i - 1] != hypothesis[j - 1]) {
        ++report.substitutions;
        ++report.confusion_pairs[{reference[i - 1], hypothesis[j - 1]}];
      }
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++report.deletions;
      --i;
    } else {
      ++report.insertions;
      --j;
    }
  }
  report.error_rate = static_cast<double>(report.errors()) / report.ref_len;
  report.accuracy = 1.0 - report.error_rate;
  return report;
}

CorpusReport ScoreCorpus(std::span<const std::pair<std::string, std::string>> pairs) {
  if (pairs.empty()) Fail("cannot score an empty corpus");
  CorpusReport report;
  AlignmentReport& total = report.total;
  for (const auto& [reference, hypothesis] : pairs) {
    AlignmentReport one = AlignAndScore(reference, hypothesis);
    total.substitutions += one.substitutions;
    total.deletions += one.deletions;
    total.insertions += one.insertions;
    total.ref_len += one.ref_len;
    for (const auto& [pair, count] : one.confusion_pairs) {
      total.confusion_pairs[pair] += count;
    }
  }
  total.error_rate = static_cast<double>(total.errors()) / total.ref_len;
  total.accuracy = 1.0 - total.error_rate;
  report.top_confusions.assign(total.confusion_pairs.begin(),
                               total.confusion_pairs.end());
  // The map is already in (ref, hyp) order, so a stable sort on count keeps
  // that as the tie order.
  std::stable_sort(report.top_confusions.begin(), report.top_confusions.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (report.top_confusions.size() > 5) report.top_confusions.resize(5);
  return report;
}

std::string FormatCorpusReport(const CorpusReport& report) {
  const AlignmentReport& t = report.total;
  auto rate = [&t](int count) { return 100.0 * count / t.ref_len; };
  std::string out;
  out += fmt::format("{:<12}{:>12}{:>15}{:>12}\n", "", "Deletions", "Substitutions",
                     "Insertions");
  out += fmt::format("{:<12}{:>12}{:>15}{:>12}\n", "Error Count", t.deletions,
                     t.substitutions, t.insertions);
  out += fmt::format("{:<12}{:>12.2f}{:>15.2f}{:>12.2f}\n", "Error Rate",
                     rate(t.deletions), rate(t.substitutions), rate(t.insertions));
  out += "\nTop confusions (ref -> hyp):\n";
  if (report.top_confusions.empty()) out += "  (none)\n";
  for (const auto& [pair, count] : report.top_confusions) {
    out += fmt::format("  ({} -> {})  {}\n", pair.first, pair.second, count);
  }
  out += fmt::format("\nReference letters: {}\n", t.ref_len);
  out += fmt::format("Letter accuracy: {:.2f}%\n", 100.0 * t.accuracy);
  return out;
}

}  // namespace fspell
