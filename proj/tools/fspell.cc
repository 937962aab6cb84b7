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

// fspell command-line driver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fspell/checkpoint.h"
#include "fspell/common.h"
#include "fspell/config.h"
#include "fspell/features_io.h"
#include "fspell/landmarks.h"
#include "fspell/metrics.h"
#include "fspell/pose_prep.h"
#include "fspell/synth.h"
#include "fspell/train.h"

namespace fspell {
namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void AddCommonOptions(CLI::App* app, CommonOptions& common) {
  app->add_option("--config", common.config_path,
                  "Config file (default: $FSPELL_CONFIG if set)");
  app->add_option("--set", common.overrides, "Override one setting, key=value")
      ->take_all();
  app->add_flag("-q,--quiet", common.quiet, "Suppress warnings");
}

Settings Resolve(const CommonOptions& common) {
  SetWarningsEnabled(!common.quiet);
  Settings settings = LoadSettings(common.config_path, common.overrides);
  // The synthetic alphabet always follows the model alphabet.
  settings.synth.vocab = settings.train.model.vocab;
  return settings;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail("cannot open '{}' for writing", path);
  return out;
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail("cannot open '{}'", path);
  return in;
}

void CloseOut(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) Fail("error writing '{}'", path);
}

std::vector<FeatureRecord> ReadFeatures(const std::string& path) {
  std::ifstream in = OpenIn(path);
  return ReadFeatureFile(in);
}

std::vector<FeatureRecord> FilterSplit(std::vector<FeatureRecord> records,
                                       const std::string& split) {
  if (split == "all") return records;
  const std::map<std::string, Split> names = {
      {"train", Split::kTrain}, {"val", Split::kVal}, {"test", Split::kTest}};
  auto it = names.find(split);
  if (it == names.end()) Fail("unknown split '{}' (train|val|test|all)", split);
  return SelectSplit(records, it->second);
}

// synth --------------------------------------------------------------------

struct SynthOptions {
  CommonOptions common;
  std::string out;
};

void RunSynth(const SynthOptions& opts) {
  Settings settings = Resolve(opts.common);
  std::vector<LandmarkSequence> corpus = GenerateSynthetic(settings.synth);
  std::ofstream out = OpenOut(opts.out);
  WriteLandmarkFile(out, corpus);
  CloseOut(out, opts.out);
  fmt::print(stderr, "synth: wrote {} sequences to {}\n", corpus.size(), opts.out);
}

// prep ---------------------------------------------------------------------

struct PrepOptions {
  CommonOptions common;
  std::string in;
  std::string out;
  std::string report;
  bool partial_hands_as_absent = false;
};

void RunPrep(const PrepOptions& opts) {
  Settings settings = Resolve(opts.common);
  ParseOptions parse;
  parse.vocabulary = settings.train.model.vocab;
  parse.partial_hands_as_absent = opts.partial_hands_as_absent;
  std::ifstream in = OpenIn(opts.in);
  std::vector<LandmarkSequence> sequences = ParseLandmarkFile(in, parse);

  SignerHistory history;
  std::vector<FeatureRecord> records;
  std::vector<HandReportRow> report;
  for (const LandmarkSequence& seq : sequences) {
    HandDecision decision = DetectSigningHand(seq, history);
    HandReportRow row{seq.video_id, seq.signer_id, decision.per_video, decision.voted,
                      decision.voted, 0.0};
    std::optional<PoseSequence> pose;
    try {
      pose = NormalizeSequence(seq, decision.voted);
    } catch (const Error& voted_error) {
      if (decision.per_video != decision.voted) {
        Warn("prep: {}; falling back to the per-video pick", voted_error.what());
        try {
          pose = NormalizeSequence(seq, decision.per_video);
          row.used = decision.per_video;
        } catch (const Error& e) {
          Warn("prep: skipping: {}", e.what());
        }
      } else {
        Warn("prep: skipping: {}", voted_error.what());
      }
    }
    if (pose) {
      row.kept_fraction = pose->kept_fraction;
      records.push_back({std::move(*pose), seq.label});
    }
    report.push_back(row);
  }

  std::ofstream out = OpenOut(opts.out);
  WriteFeatureFile(out, records);
  CloseOut(out, opts.out);
  if (!opts.report.empty()) {
    std::ofstream rep = OpenOut(opts.report);
    WriteHandReport(rep, report);
    CloseOut(rep, opts.report);
  }
  fmt::print(stderr, "prep: {} of {} sequences written to {}\n", records.size(),
             sequences.size(), opts.out);
}

// train --------------------------------------------------------------------

struct TrainOptions {
  CommonOptions common;
  std::string features;
  std::string out;
  std::string log;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
};

void RunTrain(const TrainOptions& opts) {
  Settings settings = Resolve(opts.common);
  if (opts.epochs) settings.train.epochs = *opts.epochs;
  if (opts.lr) settings.train.lr = *opts.lr;
  if (opts.seed) settings.train.seed = *opts.seed;

  std::vector<FeatureRecord> records = ReadFeatures(opts.features);
  std::vector<FeatureRecord> train_set = SelectSplit(records, Split::kTrain);
  std::vector<FeatureRecord> val_set = SelectSplit(records, Split::kVal);
  fmt::print(stderr, "train: {} train / {} val sequences\n", train_set.size(),
             val_set.size());

  std::ofstream log_out;
  if (!opts.log.empty()) log_out = OpenOut(opts.log);
  const TrainConfig& config = settings.train;
  auto on_epoch = [&](const EpochLog& log, const ModelParams& params) {
    const std::string line = FormatEpochLog(log);
    if (log_out.is_open()) {
      log_out << line << '\n';
      log_out.flush();
    }
    fmt::print(stderr, "{}\n", line);
    if (config.checkpoint_every > 0 && log.epoch % config.checkpoint_every == 0 &&
        log.epoch != config.epochs) {
      SaveCheckpointFile(fmt::format("{}.epoch{}", opts.out, log.epoch), config.model,
                         params);
    }
  };
  TrainResult result = Train(config, train_set, val_set, on_epoch);
  SaveCheckpointFile(opts.out, config.model, result.params);
  if (log_out.is_open()) CloseOut(log_out, opts.log);
  fmt::print(stderr, "train: {} updates, checkpoint {}\n", result.updates, opts.out);
}

// decode -------------------------------------------------------------------

struct DecodeOptions {
  CommonOptions common;
  std::string checkpoint;
  std::string features;
  std::string out;
  std::string strategy = "rerank";
  std::string split = "all";
  std::optional<int> beam_width;
  std::optional<double> beta;
  std::optional<double> gamma;
};

void RunDecode(const DecodeOptions& opts) {
  Settings settings = Resolve(opts.common);
  if (opts.beam_width) settings.decode.beam_width = *opts.beam_width;
  if (opts.beta) settings.decode.beta = *opts.beta;
  if (opts.gamma) settings.decode.gamma = *opts.gamma;
  settings.decode.Validate();
  const Strategy strategy = ParseStrategy(opts.strategy);

  Checkpoint ckpt = LoadCheckpointFile(opts.checkpoint);
  std::vector<FeatureRecord> records = FilterSplit(ReadFeatures(opts.features), opts.split);
  std::vector<PredictionRecord> predictions =
      DecodeCorpus(ckpt.params, ckpt.config, records, strategy, settings.decode);
  std::ofstream out = OpenOut(opts.out);
  WritePredictionFile(out, predictions, ckpt.config.vocab);
  CloseOut(out, opts.out);
  fmt::print(stderr, "decode: {} predictions ({}) written to {}\n", predictions.size(),
             StrategyName(strategy), opts.out);
}

// eval ---------------------------------------------------------------------

struct EvalOptions {
  CommonOptions common;
  std::string predictions;
  std::string references;
  std::string out;
};

void RunEval(const EvalOptions& opts) {
  Settings settings = Resolve(opts.common);
  const Vocabulary& vocab = settings.train.model.vocab;
  std::ifstream pin = OpenIn(opts.predictions);
  std::vector<PredictionRecord> predictions = ReadPredictionFile(pin, vocab);
  ParseOptions parse;
  parse.vocabulary = vocab;
  std::ifstream rin = OpenIn(opts.references);
  std::map<std::string, std::string> labels;
  for (const LandmarkSequence& seq : ParseLandmarkFile(rin, parse)) {
    if (seq.label) labels[seq.video_id] = *seq.label;
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  int missing = 0;
  for (const PredictionRecord& p : predictions) {
    auto it = labels.find(p.source_id);
    if (it == labels.end() || it->second.empty()) {
      ++missing;
      continue;
    }
    pairs.emplace_back(it->second, p.prediction);
  }
  if (missing > 0) Warn("eval: {} prediction(s) have no reference label", missing);
  const std::string text = FormatCorpusReport(ScoreCorpus(pairs));
  if (opts.out.empty()) {
    fmt::print("{}", text);
  } else {
    std::ofstream out = OpenOut(opts.out);
    out << text;
    CloseOut(out, opts.out);
  }
}

// ablate -------------------------------------------------------------------

struct AblateOptions {
  CommonOptions common;
  std::string checkpoint;
  std::string features;
  std::string split = "test";
  std::string out;
};

void RunAblate(const AblateOptions& opts) {
  Settings settings = Resolve(opts.common);
  settings.decode.Validate();
  Checkpoint ckpt = LoadCheckpointFile(opts.checkpoint);
  std::vector<FeatureRecord> records = FilterSplit(ReadFeatures(opts.features), opts.split);
  std::vector<StrategyRow> rows =
      EvaluateStrategies(ckpt.params, ckpt.config, records, settings.decode);
  const std::string text = FormatStrategyTable(rows);
  if (opts.out.empty()) {
    fmt::print("{}", text);
  } else {
    std::ofstream out = OpenOut(opts.out);
    out << text;
    CloseOut(out, opts.out);
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"fspell: pose-based fingerspelling translation"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-config", print_config,
               "Print every config key with its default value and exit");

  SynthOptions synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic landmark corpus");
  AddCommonOptions(synth_cmd, synth.common);
  synth_cmd->add_option("--out", synth.out, "Landmark file to write")->required();

  PrepOptions prep;
  CLI::App* prep_cmd =
      app.add_subcommand("prep", "Detect the signing hand and normalize landmarks");
  AddCommonOptions(prep_cmd, prep.common);
  prep_cmd->add_option("--in", prep.in, "Landmark file")->required();
  prep_cmd->add_option("--out", prep.out, "Normalized-features file to write")->required();
  prep_cmd->add_option("--report", prep.report, "Hand-decision report to write");
  prep_cmd->add_flag("--partial-hands-as-absent", prep.partial_hands_as_absent,
                     "Treat hands with fewer than 21 joints as absent");

  TrainOptions train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  AddCommonOptions(train_cmd, train.common);
  train_cmd->add_option("--features", train.features, "Normalized-features file")
      ->required();
  train_cmd->add_option("--out", train.out, "Checkpoint to write")->required();
  train_cmd->add_option("--log", train.log, "Per-epoch training log (JSON lines)");
  train_cmd->add_option("--epochs", train.epochs, "Overrides train.epochs");
  train_cmd->add_option("--lr", train.lr, "Overrides train.lr");
  train_cmd->add_option("--seed", train.seed, "Overrides train.seed");

  DecodeOptions decode;
  CLI::App* decode_cmd = app.add_subcommand("decode", "Decode a features file");
  AddCommonOptions(decode_cmd, decode.common);
  decode_cmd->add_option("--checkpoint", decode.checkpoint, "Checkpoint")->required();
  decode_cmd->add_option("--features", decode.features, "Normalized-features file")
      ->required();
  decode_cmd->add_option("--out", decode.out, "Predictions file to write")->required();
  decode_cmd->add_option("--strategy", decode.strategy, "greedy|beam|autoregressive|rerank")
      ->check(CLI::IsMember({"greedy", "beam", "autoregressive", "rerank"}));
  decode_cmd->add_option("--split", decode.split, "train|val|test|all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  decode_cmd->add_option("--beam-width", decode.beam_width, "Overrides decode.beam_width");
  decode_cmd->add_option("--beta", decode.beta, "Overrides decode.beta");
  decode_cmd->add_option("--gamma", decode.gamma, "Overrides decode.gamma");

  EvalOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against references");
  AddCommonOptions(eval_cmd, eval.common);
  eval_cmd->add_option("--predictions", eval.predictions, "Predictions file")->required();
  eval_cmd->add_option("--references", eval.references, "Reference landmark file")
      ->required();
  eval_cmd->add_option("--out", eval.out, "Report file (default: stdout)");

  AblateOptions ablate;
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "Compare all decoding strategies on one split");
  AddCommonOptions(ablate_cmd, ablate.common);
  ablate_cmd->add_option("--checkpoint", ablate.checkpoint, "Checkpoint")->required();
  ablate_cmd->add_option("--features", ablate.features, "Normalized-features file")
      ->required();
  ablate_cmd->add_option("--split", ablate.split, "train|val|test|all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  ablate_cmd->add_option("--out", ablate.out, "Table file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (print_config) {
    fmt::print("{}", DescribeSettings(Settings{}));
    return 0;
  }
  if (app.get_subcommands().empty()) {
    fmt::print(stderr, "{}", app.help());
    return 2;
  }

  try {
    if (synth_cmd->parsed()) RunSynth(synth);
    if (prep_cmd->parsed()) RunPrep(prep);
    if (train_cmd->parsed()) RunTrain(train);
    if (decode_cmd->parsed()) RunDecode(decode);
    if (eval_cmd->parsed()) RunEval(eval);
    if (ablate_cmd->parsed()) RunAblate(ablate);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace fspell

int main(int argc, char** argv) { return fspell::Main(argc, argv); }
