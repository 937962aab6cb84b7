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

#ifndef FSPELL_DECODE_H_
#define FSPELL_DECODE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fspell/length_code.h"
#include "fspell/model.h"

namespace fspell {

struct Hypothesis {
  std::vector<int> letters;
  double ctc_logp = 0.0;  // log p_ctc(W | P), summed over alignments
  // Filled in by re-ranking.
  std::optional<double> lm_logp;
  std::optional<double> length_penalty;  // |L_hat - |W||
  std::optional<double> combined;        // ctc + beta * lm - gamma * penalty
};

struct DecodeConfig {
  int beam_width = 5;
  double beta = 0.4;
  double gamma = 1.2;
  int max_decode_len = 30;

  void Validate() const;
};

enum class Strategy { kGreedy, kBeam, kAutoregressive, kRerank };

Strategy ParseStrategy(const std::string& name);
std::string StrategyName(Strategy strategy);

// Per-frame argmax, merge repeats, drop blanks. Blank is the last column.
std::vector<int> GreedyCtc(const Eigen::MatrixXd& emissions);
// The collapse rule on an explicit frame path.
std::vector<int> CollapsePath(std::span<const int> path, int blank);

// Prefix beam search with per-prefix blank / non-blank log mass; identical
// prefixes are merged with log-sum-exp. Returns at most `beam_width`
// labelings sorted by ctc_logp descending, ties by lexicographic letters.
std::vector<Hypothesis> BeamCtc(const Eigen::MatrixXd& emissions, int beam_width);

// Greedy token-by-token decoding from BOS until EOS or `max_decode_len`
// letters. PAD is never chosen.
std::vector<int> AutoregressiveDecode(const ModelParams& params,
                                      const ModelConfig& config,
                                      const Eigen::MatrixXd& memory,
                                      int max_decode_len);

// Teacher-forced sum of log p(letter_i | prefix) plus log p(EOS | word).
double ScoreHypothesisLm(const ModelParams& params, const ModelConfig& config,
                         const Eigen::MatrixXd& memory,
                         std::span<const int> letters);

struct RerankResult {
  Hypothesis best;
  std::vector<Hypothesis> ranked;
};

// Requires lm_logp on every hypothesis. Uses the continuous decoded length.
// Ties break by higher ctc_logp, then lexicographic letters.
RerankResult Rerank(std::vector<Hypothesis> hypotheses,
                    const LengthVector& length_pred, const DecodeConfig& config);

struct DecodeOutput {
  std::vector<int> prediction;
  std::vector<Hypothesis> hypotheses;  // empty for greedy/autoregressive
};

// Runs one strategy end to end on a single pose sequence.
DecodeOutput DecodeSequence(const ModelParams& params, const ModelConfig& config,
                            const Eigen::MatrixXd& features, Strategy strategy,
                            const DecodeConfig& decode_config);

}  // namespace fspell

#endif  // FSPELL_DECODE_H_
