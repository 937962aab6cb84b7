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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <fmt/ranges.h>
#include <unistd.h>

#include "fspell/common.h"
#include "fspell/decode.h"
#include "fspell/length_code.h"
#include "fspell/losses.h"
#include "fspell/metrics.h"
#include "fspell/model.h"
#include "fspell/pose_prep.h"
#include "fspell/synth.h"
#include "fspell/train.h"
#include "model_check.h"
#include "oracles.h"

#ifndef FSPELL_CLI_PATH
#error "FSPELL_CLI_PATH must name the fspell executable"
#endif

namespace fspell {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1 ------------------------------------------------------------------------

Outcome CtcOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> frames(1, 6), letters(1, 4), target_len(0, 3);
  double worst = 0.0;
  int finite = 0, mismatched_reachability = 0;
  for (int i = 0; i < 200; ++i) {
    const int t = frames(rng);
    const int n = letters(rng);
    Eigen::MatrixXd em = testing::RandomLogProbs(t, n + 1, rng);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> target(target_len(rng));
    for (int& c : target) c = pick(rng);
    const double expected = testing::BruteForceCtc(em, target, n);
    const double actual = CtcLoss(em, target).value;
    if (std::isinf(expected) || std::isinf(actual)) {
      if (std::isinf(expected) != std::isinf(actual)) ++mismatched_reachability;
      continue;
    }
    ++finite;
    worst = std::max(worst, std::abs(actual - expected));
  }
  const double seconds = SecondsSince(start);
  return {worst <= 1e-6 && mismatched_reachability == 0 && seconds < 5.0,
          fmt::format("200 instances ({} reachable), max |dp - brute| = {:.3g}, "
                      "reachability mismatches = {}, {:.2f} s",
                      finite, worst, mismatched_reachability, seconds)};
}

// 2 ------------------------------------------------------------------------

Outcome GradientCheck() {
  const auto start = Clock::now();
  ModelConfig config = testing::ToyConfig();
  auto check = testing::CheckModelGradients(config, testing::RandomParams(config, 202),
                                            testing::RandomFeatures(3, 203), {4, 17}, 5.0);
  const double seconds = SecondsSince(start);
  return {check.max_relative_error < 1e-4 && seconds < 60.0,
          fmt::format("d_model=16, T=3, |W|=2: {} entries in {} arrays, max relative "
                      "error {:.3g} ({}), {:.1f} s",
                      check.checked, check.per_param.size(), check.max_relative_error,
                      check.worst_param, seconds)};
}

// 3 ------------------------------------------------------------------------

Outcome LengthRoundTrip() {
  int failures = 0;
  double worst_norm = 0.0;
  for (int l = 1; l <= kMaxWordLength; ++l) {
    const LengthVector v = EncodeLength(l);
    worst_norm = std::max(worst_norm, std::abs(std::hypot(v[0], v[1]) - 1.0));
    if (DecodeLength(v).length != l) ++failures;
  }
  return {failures == 0 && worst_norm <= 1e-12,
          fmt::format("L=1..30: {} roundtrip failures, max | |v| - 1 | = {:.3g}", failures,
                      worst_norm)};
}

// 4 ------------------------------------------------------------------------

Outcome BeamVsExhaustive() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> frames(1, 4), letters(1, 3);
  int argmax_failures = 0, order_failures = 0;
  double worst_logp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = letters(rng);
    Eigen::MatrixXd em = testing::RandomLogProbs(frames(rng), n + 1, rng);
    const auto mass = testing::LabelingMass(em, n);
    std::vector<std::pair<std::vector<int>, double>> oracle(mass.begin(), mass.end());
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    const auto beam = BeamCtc(em, static_cast<int>(oracle.size()));
    if (beam.empty() || beam.front().letters != oracle.front().first) ++argmax_failures;
    bool same_order = beam.size() == oracle.size();
    for (std::size_t k = 0; same_order && k < beam.size(); ++k) {
      same_order = beam[k].letters == oracle[k].first;
      worst_logp = std::max(worst_logp, std::abs(beam[k].ctc_logp - std::log(oracle[k].second)));
    }
    if (!same_order) ++order_failures;
  }
  return {argmax_failures == 0 && order_failures == 0,
          fmt::format("100 instances: argmax failures {}, order failures {}, max |dlogp| {:.3g}",
                      argmax_failures, order_failures, worst_logp)};
}

// 5 ------------------------------------------------------------------------

Outcome DecoderCausality() {
  std::mt19937_64 rng(505);
  ModelConfig config = testing::ToyConfig();
  config.d_model = 32;
  config.n_heads = 4;
  config.n_dec_layers = 2;
  config.max_letters = 12;
  std::uniform_int_distribution<int> letter(0, config.vocab.num_letters() - 1);
  std::uniform_int_distribution<int> length(1, 10);
  int probes = 0, violations = 0;
  for (int set = 0; set < 50; ++set) {
    const ModelParams params = testing::RandomParams(config, 5000 + set);
    const Eigen::MatrixXd memory =
        EncoderForward(params, config, testing::RandomFeatures(6, 6000 + set)).memory;
    std::vector<int> tokens = {config.vocab.bos_id()};
    const int l = length(rng);
    for (int k = 0; k < l; ++k) tokens.push_back(letter(rng));
    for (std::size_t j = 1; j < tokens.size(); ++j) {
      int replacement = letter(rng);
      if (replacement == tokens[j]) replacement = (replacement + 1) % config.vocab.num_letters();
      ++probes;
      if (!testing::DecoderIsCausalAt(params, config, memory, tokens, j, replacement)) {
        ++violations;
      }
    }
  }
  return {violations == 0,
          fmt::format("50 parameter sets, {} token perturbations, {} bit-level violations",
                      probes, violations)};
}

// 6 ------------------------------------------------------------------------

// Raw coordinates on a 2^-10 grid, so translations by grid multiples and
// scales whose numerators fit in a few bits are exact in binary floating
// point.
LandmarkSequence GridSequence(std::mt19937_64& rng, int index) {
  std::uniform_int_distribution<int> grid(0, 1024), frames(1, 12);
  std::bernoulli_distribution present(0.8);
  LandmarkSequence seq;
  seq.video_id = fmt::format("grid-{}", index);
  seq.signer_id = "s";
  const int t = frames(rng);
  for (int f = 0; f < t; ++f) {
    HandFrame frame;
    for (auto* slot : {&frame.left, &frame.right}) {
      if (f > 0 && !present(rng)) continue;
      Hand hand;
      for (Landmark& lm : hand) lm = {grid(rng) / 1024.0, grid(rng) / 1024.0, 1.0};
      *slot = hand;
    }
    seq.frames.push_back(frame);
  }
  return seq;
}

LandmarkSequence Transform(LandmarkSequence seq, double scale, double tx, double ty) {
  for (HandFrame& frame : seq.frames) {
    for (auto* slot : {&frame.left, &frame.right}) {
      if (!*slot) continue;
      for (Landmark& lm : **slot) {
        lm.x = lm.x * scale + tx;
        lm.y = lm.y * scale + ty;
      }
    }
  }
  return seq;
}

Outcome NormalizationInvariance() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> shift(-1024, 1024), numerator(1, 512);
  int translation_failures = 0, scale_failures = 0, hand_failures = 0, compared = 0;
  double max_abs = 0.0;
  SetWarningsEnabled(false);
  for (int i = 0; i < 100; ++i) {
    const LandmarkSequence seq = GridSequence(rng, i);
    const double tx = shift(rng) / 1024.0, ty = shift(rng) / 1024.0;
    const double s = numerator(rng) / 64.0;
    const LandmarkSequence moved = Transform(seq, 1.0, tx, ty);
    const LandmarkSequence scaled = Transform(seq, s, 0.0, 0.0);
    const HandSide side = PickByVariability(seq);
    if (PickByVariability(scaled) != side) ++hand_failures;
    for (HandSide h : {HandSide::kLeft, HandSide::kRight}) {
      bool usable = true;
      PoseSequence base;
      try {
        base = NormalizeSequence(seq, h);
      } catch (const Error&) {
        usable = false;
      }
      if (!usable) continue;
      ++compared;
      max_abs = std::max(max_abs, base.features.cwiseAbs().maxCoeff());
      if (NormalizeSequence(moved, h).features != base.features) ++translation_failures;
      if (NormalizeSequence(scaled, h).features != base.features) ++scale_failures;
    }
  }
  SetWarningsEnabled(true);
  return {translation_failures == 0 && scale_failures == 0 && hand_failures == 0 &&
              max_abs <= 0.5 && compared >= 100,
          fmt::format("100 sequences ({} hand tracks): translation mismatches {}, scale "
                      "mismatches {}, hand-pick changes {}, max |feature| {:.17g}",
                      compared, translation_failures, scale_failures, hand_failures,
                      max_abs)};
}

// 7 & 8 --------------------------------------------------------------------

struct SyntheticRun {
  std::vector<FeatureRecord> train, val, test;
  TrainResult result;
  TrainConfig config;
  double seconds = 0.0;
};

// Generates synthetic words until exactly 500 fall in the training split.
std::vector<FeatureRecord> SyntheticCorpus(int train_words) {
  SynthConfig synth;
  synth.n_words = train_words * 2;
  std::vector<LandmarkSequence> corpus = GenerateSynthetic(synth);
  SignerHistory history;
  std::vector<FeatureRecord> out;
  int in_train = 0;
  for (const LandmarkSequence& seq : corpus) {
    if (SplitOf(seq.video_id) == Split::kTrain && in_train == train_words) break;
    const HandDecision d = DetectSigningHand(seq, history);
    out.push_back({NormalizeSequence(seq, d.voted), seq.label});
    if (SplitOf(seq.video_id) == Split::kTrain) ++in_train;
  }
  return out;
}

const SyntheticRun& RunSynthetic() {
  static const SyntheticRun* run = [] {
    auto* r = new SyntheticRun;
    const auto start = Clock::now();
    const std::vector<FeatureRecord> corpus = SyntheticCorpus(500);
    r->train = SelectSplit(corpus, Split::kTrain);
    r->val = SelectSplit(corpus, Split::kVal);
    r->test = SelectSplit(corpus, Split::kTest);
    r->result = Train(r->config, r->train, r->val);
    r->seconds = SecondsSince(start);
    return r;
  }();
  return *run;
}

Outcome SyntheticEndToEnd() {
  SetWarningsEnabled(false);
  const SyntheticRun& run = RunSynthetic();
  SetWarningsEnabled(true);
  const EpochLog& last = run.result.log.back();
  double best = 0.0;
  int first_epoch = 0;
  for (const EpochLog& log : run.result.log) {
    const double acc = log.holdout_letter_acc.value_or(0.0);
    if (acc >= 0.9 && first_epoch == 0) first_epoch = log.epoch;
    best = std::max(best, acc);
  }
  const double final_acc = last.holdout_letter_acc.value_or(0.0);
  return {final_acc >= 0.9 && run.seconds < 900.0 &&
              static_cast<int>(run.result.log.size()) == run.config.epochs &&
              run.train.size() == 500u,
          fmt::format("{} train / {} held-out words, {} epochs: final greedy letter accuracy "
                      "{:.2f}% (best {:.2f}%, >= 90% from epoch {}), {:.0f} s",
                      run.train.size(), run.val.size(), run.result.log.size(),
                      100.0 * final_acc, 100.0 * best, first_epoch, run.seconds)};
}

Outcome RerankAblation() {
  SetWarningsEnabled(false);
  const SyntheticRun& run = RunSynthetic();
  const auto rows =
      EvaluateStrategies(run.result.params, run.config.model, run.test, DecodeConfig{});
  SetWarningsEnabled(true);
  const double greedy = rows.at(0).letter_accuracy, beam = rows.at(1).letter_accuracy;
  const double rerank = rows.at(3).letter_accuracy;
  const std::string table = FormatStrategyTable(rows);
  const bool structure = rows.size() == 4 && rows[0].name == "Encoder Only(CTC) Greedy" &&
                         rows[1].name == "Encoder Only(CTC) + Beam" &&
                         rows[2].name == "Encoder-Decoder(CTC + CE) Autoregressive" &&
                         rows[3].name ==
                             "Encoder-Decoder Re-ranking (beam + decoder + length)" &&
                         table.find("Encoder only\n") != std::string::npos &&
                         table.find("Encoder-Decoder\n") != std::string::npos;
  fmt::print("{}", table);
  return {structure && rerank >= beam - 0.5 && beam >= greedy - 0.5,
          fmt::format("{} test words: greedy {:.2f}, beam {:.2f}, autoregressive {:.2f}, "
                      "rerank {:.2f}",
                      run.test.size(), greedy, beam, rows.at(2).letter_accuracy, rerank)};
}

// 9 ------------------------------------------------------------------------

Outcome MetricOracle() {
  std::mt19937_64 rng(909);
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const std::string ref = testing::RandomWord(rng, 1, 12, "abcdef");
    const std::string hyp = testing::RandomWord(rng, 0, 12, "abcdef");
    if (AlignAndScore(ref, hyp).errors() != testing::Levenshtein(ref, hyp)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("500 random pairs, {} mismatches", mismatches)};
}

// 10 -----------------------------------------------------------------------

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool RunCli(const std::string& args, const fs::path& dir) {
  const std::string command = fmt::format("cd '{}' && '{}' {} 2>>'{}'", dir.string(),
                                          FSPELL_CLI_PATH, args, (dir / "stderr.txt").string());
  return std::system(command.c_str()) == 0;
}

bool RunPipeline(const fs::path& dir) {
  fs::create_directories(dir);
  const std::string cfg =
      "--set synth.n_words=60 model.d_model=32 model.n_heads=4 model.ffn_dim=64 "
      "model.n_enc_layers=1 model.n_dec_layers=1 train.epochs=3 train.lr=0.001";
  return RunCli("synth --out landmarks.jsonl " + cfg, dir) &&
         RunCli("prep -q --in landmarks.jsonl --out features.jsonl --report hands.jsonl " + cfg,
                dir) &&
         RunCli("train -q --features features.jsonl --out model.ckpt --log train.jsonl " + cfg,
                dir) &&
         RunCli("decode -q --checkpoint model.ckpt --features features.jsonl --split all "
                "--strategy rerank --out predictions.jsonl " + cfg, dir) &&
         RunCli("eval -q --predictions predictions.jsonl --references landmarks.jsonl "
                "--out report.txt " + cfg, dir);
}

Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() /
                        fmt::format("fspell-acceptance-{}", static_cast<long>(::getpid()));
  fs::remove_all(root);
  const bool ran = RunPipeline(root / "a") && RunPipeline(root / "b");
  if (!ran) {
    return {false, fmt::format("pipeline failed; see {}", (root / "a" / "stderr.txt").string())};
  }
  const char* artifacts[] = {"landmarks.jsonl", "features.jsonl", "hands.jsonl", "model.ckpt",
                             "train.jsonl", "predictions.jsonl", "report.txt"};
  std::vector<std::string> differing;
  std::size_t checkpoint_bytes = 0;
  for (const char* name : artifacts) {
    const std::string a = ReadBytes(root / "a" / name);
    const std::string b = ReadBytes(root / "b" / name);
    if (a.empty() || a != b) differing.push_back(name);
    if (std::string(name) == "model.ckpt") checkpoint_bytes = a.size();
  }
  fs::remove_all(root);
  return {differing.empty(),
          fmt::format("two synth->prep->train->decode->eval runs; {} artifacts compared, "
                      "checkpoint {} bytes, differing: {}",
                      std::size(artifacts), checkpoint_bytes,
                      differing.empty() ? "none" : fmt::format("{}", fmt::join(differing, ", ")))};
}

}  // namespace
}  // namespace fspell

int main() {
  using fspell::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"CTC loss vs brute-force alignment enumeration", fspell::CtcOracle},
      {"model gradients vs central finite differences", fspell::GradientCheck},
      {"length code roundtrip", fspell::LengthRoundTrip},
      {"prefix beam search vs exhaustive labelings", fspell::BeamVsExhaustive},
      {"decoder causality", fspell::DecoderCausality},
      {"normalization invariances", fspell::NormalizationInvariance},
      {"synthetic end-to-end training", fspell::SyntheticEndToEnd},
      {"decoding strategy ablation", fspell::RerankAblation},
      {"alignment metric vs Levenshtein", fspell::MetricOracle},
      {"pipeline determinism", fspell::Determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    fmt::print("[{}] {:>2}. {}: {}\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} acceptance criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
