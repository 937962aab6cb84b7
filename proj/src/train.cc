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

#include "fspell/train.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "fspell/common.h"
#include "fspell/metrics.h"

namespace fspell {

void TrainConfig::Validate() const {
  if (epochs < 1) Fail("train: epochs must be >= 1");
  if (!(lr > 0.0)) Fail("train: lr must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    Fail("train: Adam betas must lie in [0,1)");
  }
  if (!(adam_eps > 0.0)) Fail("train: adam_eps must be > 0");
  if (!(lambda >= 0.0)) Fail("train: lambda must be >= 0");
  if (checkpoint_every < 0) Fail("train: checkpoint_every must be >= 0");
  model.Validate();
}

Split SplitOf(const std::string& source_id) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : source_id) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  const auto bucket = hash % 10;
  if (bucket < 8) return Split::kTrain;
  return bucket == 8 ? Split::kVal : Split::kTest;
}

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

std::vector<FeatureRecord> SelectSplit(std::span<const FeatureRecord> records, Split split) {
  std::vector<FeatureRecord> out;
  for (const FeatureRecord& r : records) {
    if (SplitOf(r.pose.source_id) == split) out.push_back(r);
  }
  return out;
}

namespace {

std::vector<Eigen::MatrixXd*> Flatten(ModelParams& p) {
  std::vector<Eigen::MatrixXd*> out;
  p.ForEach([&out](const std::string&, Eigen::MatrixXd& m) { out.push_back(&m); });
  return out;
}

std::vector<const Eigen::MatrixXd*> Flatten(const ModelParams& p) {
  std::vector<const Eigen::MatrixXd*> out;
  p.ForEach([&out](const std::string&, const Eigen::MatrixXd& m) { out.push_back(&m); });
  return out;
}

}  // namespace

AdamOptimizer::AdamOptimizer(const ModelParams& like, double beta1, double beta2,
                             double eps)
    : beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      first_moment_(like.ZerosLike()),
      second_moment_(like.ZerosLike()) {}

void AdamOptimizer::Step(ModelParams& params, const ModelParams& gradients, double lr) {
  ++steps_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto values = Flatten(params);
  auto grads = Flatten(gradients);
  auto m = Flatten(first_moment_);
  auto v = Flatten(second_moment_);
  for (std::size_t i = 0; i < values.size(); ++i) {
    m[i]->noalias() = beta1_ * *m[i] + (1.0 - beta1_) * *grads[i];
    v[i]->noalias() = beta2_ * *v[i] + (1.0 - beta2_) * grads[i]->cwiseAbs2();
    values[i]->array() -=
        lr * (m[i]->array() / correction1) /
        ((v[i]->array() / correction2).sqrt() + eps_);
  }
}

double ClipGradientNorm(ModelParams& gradients, double max_norm) {
  double sum = 0.0;
  gradients.ForEach([&sum](const std::string&, const Eigen::MatrixXd& g) {
    sum += g.squaredNorm();
  });
  const double norm = std::sqrt(sum);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    gradients.ForEach([factor](const std::string&, Eigen::MatrixXd& g) { g *= factor; });
  }
  return norm;
}

std::string FormatEpochLog(const EpochLog& log) {
  std::string line = fmt::format("{{\"epoch\":{},\"mean_ctc\":", log.epoch);
  AppendDouble(line, log.mean_ctc);
  line += ",\"mean_ce\":";
  AppendDouble(line, log.mean_ce);
  line += ",\"mean_mse\":";
  AppendDouble(line, log.mean_mse);
  line += ",\"mean_total\":";
  AppendDouble(line, log.mean_total);
  line += ",\"holdout_letter_acc\":";
  if (log.holdout_letter_acc) {
    AppendDouble(line, *log.holdout_letter_acc);
  } else {
    line += "null";
  }
  line += fmt::format(",\"skipped\":{}}}", log.skipped);
  return line;
}

TrainResult Train(const TrainConfig& config, std::span<const FeatureRecord> train_set,
                  std::span<const FeatureRecord> holdout_set,
                  const EpochCallback& on_epoch) {
  config.Validate();
  if (train_set.empty()) Fail("train: empty training corpus");
  const Vocabulary& vocab = config.model.vocab;
  std::vector<std::vector<int>> targets;
  targets.reserve(train_set.size());
  for (const FeatureRecord& r : train_set) {
    if (!r.label) Fail("train: record '{}' has no label", r.pose.source_id);
    if (r.label->empty() || static_cast<int>(r.label->size()) > kMaxWordLength) {
      Fail("train: label of '{}' must have 1..{} letters", r.pose.source_id,
           kMaxWordLength);
    }
    targets.push_back(vocab.Encode(*r.label));
  }

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  result.params = InitializeParams(config.model, rng());
  AdamOptimizer adam(result.params, config.adam_beta1, config.adam_beta2, config.adam_eps);
  ModelParams gradients = result.params.ZerosLike();
  GradientOptions options;
  options.lambda = config.lambda;
  options.dropout_rng = &rng;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochLog log;
    log.epoch = epoch;
    for (std::size_t index : order) {
      gradients.ForEach([](const std::string&, Eigen::MatrixXd& g) { g.setZero(); });
      std::string diagnostic;
      LossBreakdown loss =
          ComputeGradients(result.params, config.model, train_set[index].pose.features,
                           targets[index], options, &gradients, &diagnostic);
      if (loss.skip) {
        Warn("train: skipping '{}': {}", train_set[index].pose.source_id, diagnostic);
        ++log.skipped;
        continue;
      }
      if (ClipGradientNorm(gradients, config.grad_clip) > config.grad_clip &&
          config.grad_clip > 0.0) {
        ++log.clipped;
      }
      adam.Step(result.params, gradients, config.lr);
      ++log.processed;
      log.mean_ctc += loss.ctc;
      log.mean_ce += loss.ce;
      log.mean_mse += loss.mse;
      log.mean_total += loss.total;
    }
    if (log.processed == 0) Fail("train: every example of epoch {} was skipped", epoch);
    const double n = log.processed;
    log.mean_ctc /= n;
    log.mean_ce /= n;
    log.mean_mse /= n;
    log.mean_total /= n;
    if (!holdout_set.empty()) {
      auto predictions = DecodeCorpus(result.params, config.model, holdout_set,
                                      Strategy::kGreedy, DecodeConfig{});
      if (auto report = ScorePredictions(holdout_set, predictions)) {
        log.holdout_letter_acc = report->total.accuracy;
      }
    }
    if (log.clipped > 0) {
      Warn("train: epoch {} clipped the gradient norm on {} of {} updates", epoch,
           log.clipped, log.processed);
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log, result.params);
  }
  result.updates = adam.steps();
  return result;
}

std::vector<PredictionRecord> DecodeCorpus(const ModelParams& params,
                                           const ModelConfig& config,
                                           std::span<const FeatureRecord> records,
                                           Strategy strategy,
                                           const DecodeConfig& decode_config) {
  decode_config.Validate();
  std::vector<PredictionRecord> out(records.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      try {
        const FeatureRecord& r = records[i];
        DecodeOutput decoded =
            DecodeSequence(params, config, r.pose.features, strategy, decode_config);
        out[i].source_id = r.pose.source_id;
        out[i].prediction = config.vocab.Decode(decoded.prediction);
        out[i].hypotheses = std::move(decoded.hypotheses);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = records.size();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(
      std::max(1u, std::thread::hardware_concurrency()), records.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::optional<CorpusReport> ScorePredictions(std::span<const FeatureRecord> records,
                                             std::span<const PredictionRecord> predictions) {
  if (records.size() != predictions.size()) {
    Fail("score: {} records but {} predictions", records.size(), predictions.size());
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].label || records[i].label->empty()) continue;
    pairs.emplace_back(*records[i].label, predictions[i].prediction);
  }
  if (pairs.empty()) return std::nullopt;
  return ScoreCorpus(pairs);
}

std::vector<StrategyRow> EvaluateStrategies(const ModelParams& params,
                                            const ModelConfig& config,
                                            std::span<const FeatureRecord> records,
                                            const DecodeConfig& decode_config) {
  const std::pair<const char*, Strategy> strategies[] = {
      {"Encoder Only(CTC) Greedy", Strategy::kGreedy},
      {"Encoder Only(CTC) + Beam", Strategy::kBeam},
      {"Encoder-Decoder(CTC + CE) Autoregressive", Strategy::kAutoregressive},
      {"Encoder-Decoder Re-ranking (beam + decoder + length)", Strategy::kRerank},
  };
  std::vector<StrategyRow> rows;
  for (const auto& [name, strategy] : strategies) {
    auto predictions = DecodeCorpus(params, config, records, strategy, decode_config);
    auto report = ScorePredictions(records, predictions);
    if (!report) Fail("evaluate: no labelled records to score");
    rows.push_back({name, strategy, 100.0 * report->total.accuracy, report->total.ref_len});
  }
  return rows;
}

std::string FormatStrategyTable(std::span<const StrategyRow> rows) {
  constexpr int kWidth = 56;
  std::string out;
  const std::string rule(kWidth + 20, '-');
  out += rule + "\n";
  out += fmt::format("{:<{}}{:>20}\n", "Decoding Strategy", kWidth, "Letter Accuracy%");
  bool encoder_header = false, decoder_header = false;
  for (const StrategyRow& row : rows) {
    const bool encoder_only =
        row.strategy == Strategy::kGreedy || row.strategy == Strategy::kBeam;
    if (encoder_only && !encoder_header) {
      out += rule + "\n" + "Encoder only\n" + rule + "\n";
      encoder_header = true;
    }
    if (!encoder_only && !decoder_header) {
      out += rule + "\n" + "Encoder-Decoder\n" + rule + "\n";
      decoder_header = true;
    }
    out += fmt::format("{:<{}}{:>20.2f}\n", row.name, kWidth, row.letter_accuracy);
  }
  out += rule + "\n";
  if (!rows.empty()) out += fmt::format("Reference letters: {}\n", rows.front().ref_letters);
  return out;
}

}  // namespace fspell
