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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>

#include "fspell/checkpoint.h"
#include "fspell/common.h"
#include "fspell/config.h"
#include "fspell/pose_prep.h"
#include "fspell/synth.h"
#include "fspell/train.h"
#include "model_check.h"

namespace fspell {
namespace {

std::vector<FeatureRecord> Featurize(const std::vector<LandmarkSequence>& corpus) {
  std::vector<FeatureRecord> out;
  SignerHistory history;
  for (const LandmarkSequence& seq : corpus) {
    HandDecision d = DetectSigningHand(seq, history);
    out.push_back({NormalizeSequence(seq, d.voted), seq.label});
  }
  return out;
}

TrainConfig SmallTrainConfig() {
  TrainConfig config;
  config.model = testing::ToyConfig();
  config.model.max_frames = 64;
  config.model.max_letters = 32;
  config.model.dropout = 0.1;
  config.lr = 1e-3;
  return config;
}

TEST(SynthTest, FrameCountFormula) {
  SynthConfig config;
  config.n_words = 20;
  config.frames_per_letter_min = config.frames_per_letter_max = 4;
  config.transition_frames = 3;
  for (const LandmarkSequence& seq : GenerateSynthetic(config)) {
    const int l = static_cast<int>(seq.label->size());
    EXPECT_EQ(static_cast<int>(seq.frames.size()), l * 4 + (l - 1) * 3);
    EXPECT_GE(l, config.word_len_min);
    EXPECT_LE(l, config.word_len_max);
  }
}

TEST(SynthTest, NoiselessSingleLetterHold) {
  SynthConfig config;
  config.n_words = 1;
  config.word_len_min = config.word_len_max = 1;
  config.frames_per_letter_min = config.frames_per_letter_max = 3;
  config.noise_sigma = 0.0;
  config.idle_hand_presence = 0.0;
  auto corpus = GenerateSynthetic(config);
  ASSERT_EQ(corpus[0].frames.size(), 3u);
  const HandSide side = corpus[0].frames[0].right ? HandSide::kRight : HandSide::kLeft;
  const Hand& first = *corpus[0].frames[0].hand(side);
  for (const HandFrame& frame : corpus[0].frames) {
    const Hand& h = *frame.hand(side);
    for (int j = 0; j < kNumHandJoints; ++j) {
      EXPECT_EQ(h[j].x, first[j].x);
      EXPECT_EQ(h[j].y, first[j].y);
    }
  }
}

TEST(SynthTest, DeterministicAndValid) {
  SynthConfig config;
  config.n_words = 30;
  auto a = GenerateSynthetic(config);
  auto b = GenerateSynthetic(config);
  EXPECT_EQ(a, b);
  SetWarningsEnabled(false);
  for (const LandmarkSequence& seq : a) EXPECT_NO_THROW(ValidateSequence(seq, config.vocab));
  SetWarningsEnabled(true);
  config.seed = 8;
  EXPECT_NE(GenerateSynthetic(config), a);
}

TEST(SynthTest, HandDetectionRecoversSigningHand) {
  SynthConfig config;
  config.n_words = 100;
  config.left_handed_fraction = 0.5;
  const auto corpus = GenerateSynthetic(config);
  SignerHistory history;
  int correct = 0;
  for (const LandmarkSequence& seq : corpus) {
    const HandDecision d = DetectSigningHand(seq, history);
    // The signing hand appears in every frame; the idle hand does not.
    bool always = true;
    for (const HandFrame& f : seq.frames) always = always && f.hand(d.voted).has_value();
    correct += always;
  }
  EXPECT_GE(correct, 95);
}

TEST(SplitTest, DeterministicProportions) {
  std::array<int, 3> counts{};
  for (int i = 0; i < 3000; ++i) {
    const std::string id = "synth-" + std::to_string(i);
    EXPECT_EQ(SplitOf(id), SplitOf(id));
    ++counts[static_cast<int>(SplitOf(id))];
  }
  EXPECT_NEAR(counts[0] / 3000.0, 0.8, 0.03);
  EXPECT_NEAR(counts[1] / 3000.0, 0.1, 0.02);
  EXPECT_NEAR(counts[2] / 3000.0, 0.1, 0.02);
  EXPECT_EQ(SplitName(Split::kTest), "test");
}

TEST(AdamTest, SingleStepMovesByLearningRate) {
  ModelConfig config = testing::ToyConfig();
  ModelParams params = testing::RandomParams(config, 1);
  const ModelParams start = params;
  ModelParams grads = params.ZerosLike();
  grads.length_token.setConstant(3.0);
  grads.length_token(0, 0) = -0.5;
  AdamOptimizer adam(params, 0.9, 0.999, 1e-8);
  adam.Step(params, grads, 0.01);
  EXPECT_EQ(adam.steps(), 1);
  // With bias correction the first step is lr * sign(g) up to eps.
  EXPECT_NEAR(params.length_token(0, 1), start.length_token(0, 1) - 0.01, 1e-9);
  EXPECT_NEAR(params.length_token(0, 0), start.length_token(0, 0) + 0.01, 1e-9);
  EXPECT_EQ(params.input_proj.weight, start.input_proj.weight);
}

TEST(ClipTest, ScalesToMaxNorm) {
  ModelConfig config = testing::ToyConfig();
  ModelParams grads = testing::RandomParams(config, 2).ZerosLike();
  grads.length_token.setConstant(1.0);  // norm 4 over 16 entries
  EXPECT_DOUBLE_EQ(ClipGradientNorm(grads, 2.0), 4.0);
  EXPECT_NEAR(grads.length_token.norm(), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(ClipGradientNorm(grads, 5.0), 2.0);
  EXPECT_NEAR(grads.length_token.norm(), 2.0, 1e-12);
}

TEST(TrainTest, OneExampleOneUpdate) {
  SynthConfig synth;
  synth.n_words = 1;
  auto records = Featurize(GenerateSynthetic(synth));
  TrainConfig config = SmallTrainConfig();
  config.epochs = 1;
  TrainResult result = Train(config, records, {});
  EXPECT_EQ(result.updates, 1);
  ASSERT_EQ(result.log.size(), 1u);
  EXPECT_EQ(result.log[0].processed + result.log[0].skipped, 1);
  EXPECT_FALSE(result.log[0].holdout_letter_acc);
}

TEST(TrainTest, SkipsUnreachableTargets) {
  SynthConfig synth;
  synth.n_words = 4;
  auto records = Featurize(GenerateSynthetic(synth));
  // A single frame cannot emit a three-letter word.
  records[1].pose.features = records[1].pose.features.topRows(1).eval();
  TrainConfig config = SmallTrainConfig();
  config.epochs = 2;
  SetWarningsEnabled(false);
  TrainResult result = Train(config, records, {});
  SetWarningsEnabled(true);
  for (const EpochLog& log : result.log) {
    EXPECT_EQ(log.skipped, 1);
    EXPECT_EQ(log.processed + log.skipped, 4);
  }
  EXPECT_EQ(result.updates, 6);
}

TEST(TrainTest, DeterministicCheckpoints) {
  SynthConfig synth;
  synth.n_words = 12;
  auto records = Featurize(GenerateSynthetic(synth));
  TrainConfig config = SmallTrainConfig();
  config.epochs = 2;
  auto a = Train(config, records, records);
  auto b = Train(config, records, records);
  EXPECT_EQ(SerializeCheckpoint(config.model, a.params),
            SerializeCheckpoint(config.model, b.params));
  EXPECT_EQ(FormatEpochLog(a.log.back()), FormatEpochLog(b.log.back()));
  config.seed = 2;
  auto c = Train(config, records, records);
  EXPECT_NE(SerializeCheckpoint(config.model, a.params),
            SerializeCheckpoint(config.model, c.params));
}

TEST(TrainTest, LossDecreasesOnNoiselessCorpus) {
  SynthConfig synth;
  synth.n_words = 50;
  synth.noise_sigma = 0.0;
  auto records = Featurize(GenerateSynthetic(synth));
  TrainConfig config;
  config.epochs = 5;
  TrainResult result = Train(config, records, {});
  ASSERT_EQ(result.log.size(), 5u);
  for (std::size_t i = 1; i < result.log.size(); ++i) {
    EXPECT_LT(result.log[i].mean_total, result.log[i - 1].mean_total) << "epoch " << i + 1;
  }
}

TEST(TrainTest, EpochLogFormat) {
  EpochLog log;
  log.epoch = 3;
  log.mean_ctc = 0.5;
  log.mean_ce = 0.25;
  log.mean_mse = 0.125;
  log.mean_total = 2.875;
  log.skipped = 1;
  EXPECT_EQ(FormatEpochLog(log),
            R"({"epoch":3,"mean_ctc":0.5,"mean_ce":0.25,"mean_mse":0.125,)"
            R"("mean_total":2.875,"holdout_letter_acc":null,"skipped":1})");
  log.holdout_letter_acc = 0.75;
  EXPECT_NE(FormatEpochLog(log).find(R"("holdout_letter_acc":0.75)"), std::string::npos);
}

TEST(EvaluateTest, StrategyTableShape) {
  SynthConfig synth;
  synth.n_words = 6;
  auto records = Featurize(GenerateSynthetic(synth));
  ModelConfig model = SmallTrainConfig().model;
  ModelParams params = testing::RandomParams(model, 3);
  DecodeConfig decode;
  decode.beta = 0.0;
  decode.gamma = 0.0;
  auto rows = EvaluateStrategies(params, model, records, decode);
  ASSERT_EQ(rows.size(), 4u);
  for (const StrategyRow& row : rows) EXPECT_EQ(row.ref_letters, rows[0].ref_letters);
  EXPECT_EQ(rows[3].letter_accuracy, rows[1].letter_accuracy);
  const std::string table = FormatStrategyTable(rows);
  for (const char* needle : {"Encoder only", "Encoder-Decoder\n", "Encoder Only(CTC) Greedy",
                             "Encoder Only(CTC) + Beam",
                             "Encoder-Decoder(CTC + CE) Autoregressive",
                             "Encoder-Decoder Re-ranking (beam + decoder + length)"}) {
    EXPECT_NE(table.find(needle), std::string::npos) << needle;
  }
  auto beam = DecodeCorpus(params, model, records, Strategy::kBeam, decode);
  auto rerank = DecodeCorpus(params, model, records, Strategy::kRerank, decode);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(beam[i].prediction, rerank[i].prediction);
  }
}

TEST(ConfigTest, ParsesFileAndOverrides) {
  Settings settings;
  ApplyConfigText(settings,
                  "# comment\n"
                  "model.d_model = 64   # trailing\n"
                  "\n"
                  "train.lr=0.001\n"
                  "decode.beta = 0.5\n"
                  "synth.seed = 99\n"
                  "model.vocab = abc\n");
  EXPECT_EQ(settings.train.model.d_model, 64);
  EXPECT_EQ(settings.train.lr, 0.001);
  EXPECT_EQ(settings.decode.beta, 0.5);
  EXPECT_EQ(settings.synth.seed, 99u);
  EXPECT_EQ(settings.train.model.vocab.letters(), "abc");
  EXPECT_THROW(ApplyConfigText(settings, "model.width = 3\n"), Error);
  EXPECT_THROW(ApplyConfigText(settings, "model.d_model = big\n"), Error);
  EXPECT_THROW(ApplyConfigText(settings, "model.d_model\n"), Error);
}

TEST(ConfigTest, EnvironmentVariableAndPrecedence) {
  const std::string path = ::testing::TempDir() + "fspell_config_test.cfg";
  {
    std::ofstream out(path);
    out << "train.epochs = 7\ndecode.beam_width = 9\n";
  }
  ::setenv(kConfigEnvVar, path.c_str(), 1);
  Settings settings = LoadSettings("", {"decode.beam_width=3"});
  ::unsetenv(kConfigEnvVar);
  EXPECT_EQ(settings.train.epochs, 7);
  EXPECT_EQ(settings.decode.beam_width, 3);
  EXPECT_THROW(LoadSettings("/nonexistent/fspell.cfg", {}), Error);
  EXPECT_THROW(LoadSettings("", {"decode.beam_width"}), Error);
}

TEST(ConfigTest, DescribeListsEveryKey) {
  const std::string text = DescribeSettings(Settings{});
  Settings reparsed;
  ApplyConfigText(reparsed, text);
  EXPECT_EQ(DescribeSettings(reparsed), text);
  for (const char* key : {"model.d_model", "train.lambda", "decode.gamma",
                          "synth.noise_sigma", "train.checkpoint_every"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace fspell
