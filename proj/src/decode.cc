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

#include "fspell/decode.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

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

struct PrefixMass {
  double blank = kNegInf;     // paths ending in blank
  double non_blank = kNegInf;  // paths ending in the last letter
  double total() const { return LogAdd(blank, non_blank); }
};

bool HypothesisOrder(const std::vector<int>& a, double score_a,
                     const std::vector<int>& b, double score_b) {
  if (score_a != score_b) return score_a > score_b;
  return a < b;
}

}  // namespace

void DecodeConfig::Validate() const {
  if (beam_width < 1) Fail("beam_width must be >= 1, got {}", beam_width);
  if (!(beta >= 0.0) || !(gamma >= 0.0)) Fail("beta and gamma must be >= 0");
  if (max_decode_len < 0) Fail("max_decode_len must be >= 0");
}

Strategy ParseStrategy(const std::string& name) {
  if (name == "greedy") return Strategy::kGreedy;
  if (name == "beam") return Strategy::kBeam;
  if (name == "autoregressive") return Strategy::kAutoregressive;
  if (name == "rerank") return Strategy::kRerank;
  Fail("unknown decoding strategy '{}'", name);
}

std::string StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kBeam: return "beam";
    case Strategy::kAutoregressive: return "autoregressive";
    case Strategy::kRerank: return "rerank";
  }
  return "unknown";
}

std::vector<int> CollapsePath(std::span<const int> path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int id : path) {
    if (id != prev && id != blank) out.push_back(id);
    prev = id;
  }
  return out;
}

std::vector<int> GreedyCtc(const Eigen::MatrixXd& emissions) {
  std::vector<int> path(emissions.rows());
  for (Eigen::Index t = 0; t < emissions.rows(); ++t) {
    Eigen::Index best;
    emissions.row(t).maxCoeff(&best);
    path[t] = static_cast<int>(best);
  }
  return CollapsePath(path, static_cast<int>(emissions.cols()) - 1);
}

std::vector<Hypothesis> BeamCtc(const Eigen::MatrixXd& emissions, int beam_width) {
  if (beam_width < 1) Fail("beam_width must be >= 1, got {}", beam_width);
  const int classes = static_cast<int>(emissions.cols());
  const int blank = classes - 1;
  using Beam = std::map<std::vector<int>, PrefixMass>;
  Beam beam;
  beam[{}].blank = 0.0;
  for (Eigen::Index t = 0; t < emissions.rows(); ++t) {
    Beam next;
    for (const auto& [prefix, mass] : beam) {
      const double p_blank = emissions(t, blank);
      // Prefix unchanged by a blank.
      PrefixMass& same = next[prefix];
      same.blank = LogAdd(same.blank, mass.total() + p_blank);
      for (int c = 0; c < blank; ++c) {
        const double p = emissions(t, c);
        std::vector<int> extended = prefix;
        extended.push_back(c);
        PrefixMass& ext = next[extended];
        if (!prefix.empty() && prefix.back() == c) {
          // Repeat collapses unless a blank separated it.
          ext.non_blank = LogAdd(ext.non_blank, mass.blank + p);
          PrefixMass& stay = next[prefix];
          stay.non_blank = LogAdd(stay.non_blank, mass.non_blank + p);
        } else {
          ext.non_blank = LogAdd(ext.non_blank, mass.total() + p);
        }
      }
    }
    std::vector<std::pair<std::vector<int>, PrefixMass>> ranked;
    ranked.reserve(next.size());
    for (auto& entry : next) {
      // Prefixes no path can reach (a repeat with no blank between) carry
      // zero mass.
      if (entry.second.total() > -std::numeric_limits<double>::infinity()) {
        ranked.push_back(std::move(entry));
      }
    }
    if (ranked.empty()) Fail("beam search: every prefix has zero probability at frame {}", t);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return HypothesisOrder(a.first, a.second.total(), b.first, b.second.total());
    });
    if (static_cast<int>(ranked.size()) > beam_width) ranked.resize(beam_width);
    beam = Beam(ranked.begin(), ranked.end());
  }
  std::vector<Hypothesis> out;
  out.reserve(beam.size());
  for (const auto& [prefix, mass] : beam) {
    Hypothesis h;
    h.letters = prefix;
    h.ctc_logp = std::min(0.0, mass.total());
    out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const Hypothesis& a, const Hypothesis& b) {
    return HypothesisOrder(a.letters, a.ctc_logp, b.letters, b.ctc_logp);
  });
  return out;
}

std::vector<int> AutoregressiveDecode(const ModelParams& params,
                                      const ModelConfig& config,
                                      const Eigen::MatrixXd& memory,
                                      int max_decode_len) {
  const Vocabulary& vocab = config.vocab;
  const int cap = std::min(max_decode_len, config.max_letters - 1);
  std::vector<int> tokens{vocab.bos_id()};
  std::vector<int> letters;
  while (static_cast<int>(letters.size()) < cap) {
    Eigen::MatrixXd logprobs = DecoderForward(params, config, memory, tokens);
    auto last = logprobs.row(logprobs.rows() - 1).head(vocab.num_letters() + 1);
    Eigen::Index best;
    last.maxCoeff(&best);
    if (best == vocab.eos_class()) break;
    letters.push_back(static_cast<int>(best));
    tokens.push_back(static_cast<int>(best));
  }
  return letters;
}

double ScoreHypothesisLm(const ModelParams& params, const ModelConfig& config,
                         const Eigen::MatrixXd& memory, std::span<const int> letters) {
  if (static_cast<int>(letters.size()) > config.max_letters - 1) {
    Fail("hypothesis of {} letters exceeds max_letters - 1 = {}", letters.size(),
         config.max_letters - 1);
  }
  std::vector<int> tokens{config.vocab.bos_id()};
  tokens.insert(tokens.end(), letters.begin(), letters.end());
  Eigen::MatrixXd logprobs = DecoderForward(params, config, memory, tokens);
  double total = 0.0;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    total += logprobs(static_cast<Eigen::Index>(i), letters[i]);
  }
  total += logprobs(logprobs.rows() - 1, config.vocab.eos_class());
  return total;
}

RerankResult Rerank(std::vector<Hypothesis> hypotheses, const LengthVector& length_pred,
                    const DecodeConfig& config) {
  if (hypotheses.empty()) Fail("rerank: empty hypothesis list");
  const double predicted = DecodeLength(length_pred).continuous;
  for (Hypothesis& h : hypotheses) {
    if (!h.lm_logp) Fail("rerank: hypothesis without lm_logp");
    h.length_penalty = std::abs(predicted - static_cast<double>(h.letters.size()));
    h.combined = h.ctc_logp + config.beta * *h.lm_logp - config.gamma * *h.length_penalty;
  }
  std::stable_sort(hypotheses.begin(), hypotheses.end(),
                   [](const Hypothesis& a, const Hypothesis& b) {
                     if (*a.combined != *b.combined) return *a.combined > *b.combined;
                     if (a.ctc_logp != b.ctc_logp) return a.ctc_logp > b.ctc_logp;
                     return a.letters < b.letters;
                   });
  RerankResult result;
  result.best = hypotheses.front();
  result.ranked = std::move(hypotheses);
  return result;
}

DecodeOutput DecodeSequence(const ModelParams& params, const ModelConfig& config,
                            const Eigen::MatrixXd& features, Strategy strategy,
                            const DecodeConfig& decode_config) {
  decode_config.Validate();
  EncoderOutput enc = EncoderForward(params, config, features);
  DecodeOutput out;
  switch (strategy) {
    case Strategy::kGreedy:
      out.prediction = GreedyCtc(enc.emissions);
      break;
    case Strategy::kBeam:
      out.hypotheses = BeamCtc(enc.emissions, decode_config.beam_width);
      out.prediction = out.hypotheses.front().letters;
      break;
    case Strategy::kAutoregressive:
      out.prediction =
          AutoregressiveDecode(params, config, enc.memory, decode_config.max_decode_len);
      break;
    case Strategy::kRerank: {
      std::vector<Hypothesis> beam = BeamCtc(enc.emissions, decode_config.beam_width);
      std::vector<Hypothesis> hyps;
      for (Hypothesis& h : beam) {
        if (static_cast<int>(h.letters.size()) > config.max_letters - 1) continue;
        h.lm_logp = ScoreHypothesisLm(params, config, enc.memory, h.letters);
        hyps.push_back(std::move(h));
      }
      if (hyps.empty()) {
        Warn("rerank: every hypothesis exceeds the decoder length limit");
        out.prediction = beam.front().letters;
        out.hypotheses = std::move(beam);
        break;
      }
      RerankResult ranked = Rerank(std::move(hyps), enc.length_pred, decode_config);
      out.prediction = ranked.best.letters;
      out.hypotheses = std::move(ranked.ranked);
      break;
    }
  }
  return out;
}

}  // namespace fspell
