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

#include <cmath>
#include <random>
#include <sstream>

#include "fspell/checkpoint.h"
#include "fspell/common.h"
#include "fspell/model.h"
#include "model_check.h"

namespace fspell {
namespace {

using testing::RandomFeatures;
using testing::RandomParams;
using testing::ToyConfig;

TEST(ModelConfigTest, Validation) {
  ModelConfig config;
  EXPECT_NO_THROW(config.Validate());
  config.n_heads = 7;
  EXPECT_THROW(config.Validate(), Error);
  config = ModelConfig{};
  config.n_enc_layers = 0;
  EXPECT_THROW(config.Validate(), Error);
}

TEST(ModelTest, EncoderShapes) {
  ModelConfig config = ToyConfig();
  ModelParams params = InitializeParams(config, 1);
  ValidateParams(params, config);
  EncoderOutput out = EncoderForward(params, config, RandomFeatures(4, 2));
  EXPECT_EQ(out.emissions.rows(), 4);
  EXPECT_EQ(out.emissions.cols(), 27);
  EXPECT_EQ(out.memory.rows(), 5);
  EXPECT_EQ(out.memory.cols(), config.d_model);
  for (int t = 0; t < 4; ++t) {
    EXPECT_NEAR(out.emissions.row(t).array().exp().sum(), 1.0, 1e-6);
  }
}

TEST(ModelTest, ZeroHeadsGiveUniformRows) {
  ModelConfig config = ToyConfig();
  ModelParams params = RandomParams(config, 3);
  params.emission_head.weight.setZero();
  params.emission_head.bias.setZero();
  params.output_head.weight.setZero();
  params.output_head.bias.setZero();
  EncoderOutput out = EncoderForward(params, config, RandomFeatures(3, 4));
  EXPECT_LT((out.emissions.array() - std::log(1.0 / 27)).abs().maxCoeff(), 1e-12);
  const int bos = config.vocab.bos_id();
  Eigen::MatrixXd dec = DecoderForward(params, config, out.memory, std::vector<int>{bos, 0, 1});
  EXPECT_EQ(dec.rows(), 3);
  EXPECT_EQ(dec.cols(), config.vocab.num_decoder_classes());
  EXPECT_LT((dec.array() - std::log(1.0 / 28)).abs().maxCoeff(), 1e-12);
}

TEST(ModelTest, FrameOrderMatters) {
  ModelConfig config = ToyConfig();
  ModelParams params = RandomParams(config, 5);
  Eigen::MatrixXd features = RandomFeatures(4, 6);
  Eigen::MatrixXd swapped = features;
  swapped.row(0).swap(swapped.row(2));
  EncoderOutput a = EncoderForward(params, config, features);
  EncoderOutput b = EncoderForward(params, config, swapped);
  EXPECT_GT((a.memory - b.memory).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ModelTest, InputErrors) {
  ModelConfig config = ToyConfig();
  ModelParams params = InitializeParams(config, 1);
  EXPECT_THROW(EncoderForward(params, config, Eigen::MatrixXd::Zero(0, 42)), Error);
  EXPECT_THROW(EncoderForward(params, config, Eigen::MatrixXd::Zero(3, 40)), Error);
  EXPECT_THROW(EncoderForward(params, config, Eigen::MatrixXd::Zero(config.max_frames + 1, 42)),
               Error);
  EncoderOutput out = EncoderForward(params, config, RandomFeatures(3, 1));
  EXPECT_THROW(DecoderForward(params, config, out.memory, std::vector<int>{0, 1}), Error);
  EXPECT_THROW(DecoderForward(params, config, out.memory,
                              std::vector<int>{config.vocab.bos_id(), config.vocab.pad_id()}),
               Error);
}

TEST(ModelTest, DecoderIsCausal) {
  ModelConfig config = ToyConfig();
  const int bos = config.vocab.bos_id();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ModelParams params = RandomParams(config, seed);
    EncoderOutput out = EncoderForward(params, config, RandomFeatures(5, seed));
    EXPECT_TRUE(testing::DecoderIsCausalAt(params, config, out.memory, {bos, 0, 1}, 1, 2));
    EXPECT_TRUE(testing::DecoderIsCausalAt(params, config, out.memory, {bos, 3, 4, 5}, 2, 9));
    EXPECT_TRUE(testing::DecoderIsCausalAt(params, config, out.memory, {bos, 3, 4, 5}, 3, 0));
  }
}

TEST(GradientTest, MatchesFiniteDifferences) {
  ModelConfig config = ToyConfig();
  auto check = testing::CheckModelGradients(config, RandomParams(config, 9),
                                            RandomFeatures(3, 10), {1, 2}, 5.0);
  EXPECT_LT(check.max_relative_error, 1e-4) << check.worst_param;
  EXPECT_EQ(check.checked, RandomParams(config, 9).NumValues());
}

TEST(GradientTest, UnusedParametersGetExactZero) {
  ModelConfig config = ToyConfig();
  ModelParams params = RandomParams(config, 11);
  ModelParams grads = params.ZerosLike();
  ComputeGradients(params, config, RandomFeatures(3, 12), std::vector<int>{1, 2},
                   GradientOptions{}, &grads);
  // Three frames use encoder positions 0..3 and the decoder sees 3 tokens.
  EXPECT_EQ(grads.encoder_positions.bottomRows(config.max_frames + 1 - 4).cwiseAbs().maxCoeff(),
            0.0);
  EXPECT_EQ(grads.decoder_positions.bottomRows(config.max_letters - 3).cwiseAbs().maxCoeff(),
            0.0);
  EXPECT_EQ(grads.token_embedding.row(config.vocab.pad_id()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(grads.token_embedding.row(config.vocab.bos_id()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GradientTest, LossScaleIsLinear) {
  ModelConfig config = ToyConfig();
  ModelParams params = RandomParams(config, 13);
  const Eigen::MatrixXd features = RandomFeatures(4, 14);
  const std::vector<int> target = {0, 3};
  ModelParams once = params.ZerosLike(), twice = params.ZerosLike();
  GradientOptions options;
  ComputeGradients(params, config, features, target, options, &once);
  options.loss_scale = 2.0;
  ComputeGradients(params, config, features, target, options, &twice);
  std::vector<const Eigen::MatrixXd*> a, b;
  once.ForEach([&](const std::string&, const Eigen::MatrixXd& m) { a.push_back(&m); });
  twice.ForEach([&](const std::string&, const Eigen::MatrixXd& m) { b.push_back(&m); });
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(2.0 * *a[i], *b[i]);
}

TEST(GradientTest, UnreachableTargetIsSkipped) {
  ModelConfig config = ToyConfig();
  ModelParams params = RandomParams(config, 15);
  ModelParams grads = params.ZerosLike();
  std::string diagnostic;
  LossBreakdown loss = ComputeGradients(params, config, RandomFeatures(2, 16),
                                        std::vector<int>{4, 4}, GradientOptions{}, &grads,
                                        &diagnostic);
  EXPECT_TRUE(loss.skip);
  EXPECT_FALSE(diagnostic.empty());
  grads.ForEach([](const std::string&, const Eigen::MatrixXd& g) {
    EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
  });
}

TEST(GradientTest, BreakdownMatchesComponents) {
  ModelConfig config = ToyConfig();
  ModelParams params = RandomParams(config, 17);
  LossBreakdown loss = ComputeGradients(params, config, RandomFeatures(4, 18),
                                        std::vector<int>{2, 5, 7}, GradientOptions{}, nullptr);
  EXPECT_DOUBLE_EQ(loss.total, loss.lambda * loss.ctc + loss.ce + loss.mse);
  EXPECT_GT(loss.ctc, 0.0);
  EXPECT_GT(loss.ce, 0.0);
  EXPECT_GE(loss.mse, 0.0);
}

TEST(CheckpointTest, ByteExactRoundTrip) {
  ModelConfig config = ToyConfig();
  config.vocab = Vocabulary("abcdefg");
  ModelParams params = RandomParams(config, 19);
  const std::string bytes = SerializeCheckpoint(config, params);
  std::istringstream in(bytes);
  Checkpoint loaded = LoadCheckpoint(in);
  EXPECT_EQ(loaded.config, config);
  EXPECT_EQ(SerializeCheckpoint(loaded.config, loaded.params), bytes);
  const Eigen::MatrixXd features = RandomFeatures(3, 20);
  EXPECT_EQ(EncoderForward(params, config, features).emissions,
            EncoderForward(loaded.params, loaded.config, features).emissions);
}

TEST(CheckpointTest, RejectsCorruption) {
  ModelConfig config = ToyConfig();
  const std::string bytes = SerializeCheckpoint(config, RandomParams(config, 21));
  {
    std::istringstream in(bytes.substr(0, bytes.size() - 8));
    EXPECT_THROW(LoadCheckpoint(in), Error);
  }
  {
    std::istringstream in(bytes + "x");
    EXPECT_THROW(LoadCheckpoint(in), Error);
  }
  {
    std::string bad = bytes;
    bad.replace(bad.find("format_version 1"), 16, "format_version 9");
    std::istringstream in(bad);
    EXPECT_THROW(LoadCheckpoint(in), Error);
  }
}

}  // namespace
}  // namespace fspell
