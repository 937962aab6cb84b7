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

#ifndef FSPELL_TRAIN_H_
#define FSPELL_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fspell/decode.h"
#include "fspell/features_io.h"
#include "fspell/losses.h"
#include "fspell/metrics.h"
#include "fspell/model.h"

namespace fspell {

struct TrainConfig {
  int epochs = 20;
  double lr = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double lambda = 5.0;
  double grad_clip = 5.0;  // global L2 norm; <= 0 disables
  std::uint64_t seed = 1;
  int checkpoint_every = 0;  // epochs; 0 writes only the final checkpoint
  ModelConfig model;

  void Validate() const;
};

// Fixed 80/10/10 split keyed on a 64-bit FNV-1a hash of the source id.
enum class Split { kTrain, kVal, kTest };

Split SplitOf(const std::string& source_id);
std::string SplitName(Split split);
std::vector<FeatureRecord> SelectSplit(std::span<const FeatureRecord> records, Split split);

// Adam with bias correction over every array of a ModelParams.
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& like, double beta1, double beta2, double eps);

  void Step(ModelParams& params, const ModelParams& gradients, double lr);
  long steps() const { return steps_; }

 private:
  double beta1_, beta2_, eps_;
  long steps_ = 0;
  ModelParams first_moment_;
  ModelParams second_moment_;
};

// Scales `gradients` down to `max_norm` if its global norm exceeds it.
// Returns the norm before clipping.
double ClipGradientNorm(ModelParams& gradients, double max_norm);

struct EpochLog {
  int epoch = 0;
  double mean_ctc = 0.0;
  double mean_ce = 0.0;
  double mean_mse = 0.0;
  double mean_total = 0.0;
  std::optional<double> holdout_letter_acc;  // null without held-out data
  int skipped = 0;
  int processed = 0;
  int clipped = 0;
};

// {"epoch": int, "mean_ctc": f, "mean_ce": f, "mean_mse": f,
//  "mean_total": f, "holdout_letter_acc": f|null, "skipped": int}
std::string FormatEpochLog(const EpochLog& log);

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
  long updates = 0;
};

using EpochCallback = std::function<void(const EpochLog&, const ModelParams&)>;

// Batch size 1, shuffled each epoch, deterministic in config.seed. Every
// training record needs a label of 1..30 vocabulary letters. Examples whose
// CTC loss is infinite are skipped and counted. Throws fspell::Error on an
// empty corpus or an epoch where everything was skipped.
TrainResult Train(const TrainConfig& config, std::span<const FeatureRecord> train_set,
                  std::span<const FeatureRecord> holdout_set,
                  const EpochCallback& on_epoch = {});

// Decodes every record with one strategy.
std::vector<PredictionRecord> DecodeCorpus(const ModelParams& params,
                                           const ModelConfig& config,
                                           std::span<const FeatureRecord> records,
                                           Strategy strategy,
                                           const DecodeConfig& decode_config);

// Letter accuracy of predictions against record labels (records without a
// label are ignored). Returns nullopt when nothing is scorable.
std::optional<CorpusReport> ScorePredictions(std::span<const FeatureRecord> records,
                                             std::span<const PredictionRecord> predictions);

struct StrategyRow {
  std::string name;
  Strategy strategy;
  double letter_accuracy = 0.0;  // percent
  int ref_letters = 0;
};

// Greedy, beam, autoregressive and re-ranking on the same records.
std::vector<StrategyRow> EvaluateStrategies(const ModelParams& params,
                                            const ModelConfig& config,
                                            std::span<const FeatureRecord> records,
                                            const DecodeConfig& decode_config);

// Two-column table grouped into encoder-only and encoder-decoder rows.
std::string FormatStrategyTable(std::span<const StrategyRow> rows);

}  // namespace fspell

#endif  // FSPELL_TRAIN_H_
