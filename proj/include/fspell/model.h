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

#ifndef FSPELL_MODEL_H_
#define FSPELL_MODEL_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fspell/autograd.h"
#include "fspell/length_code.h"
#include "fspell/losses.h"
#include "fspell/vocabulary.h"

namespace fspell {

struct ModelConfig {
  int input_dim = 42;
  int d_model = 128;
  int n_enc_layers = 3;
  int n_dec_layers = 3;
  int n_heads = 8;
  int ffn_dim = 512;
  int max_frames = 512;
  int max_letters = 32;
  double dropout = 0.1;
  Vocabulary vocab;

  // Throws fspell::Error on inconsistent sizes.
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Weight matrices are (in x out) and act on row vectors; biases are 1 x out.
struct Linear {
  Eigen::MatrixXd weight;
  Eigen::MatrixXd bias;
};

struct LayerNormWeights {
  Eigen::MatrixXd gain;
  Eigen::MatrixXd bias;
};

struct AttentionWeights {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
};

struct EncoderLayerWeights {
  LayerNormWeights attn_norm;
  AttentionWeights self_attn;
  LayerNormWeights ffn_norm;
  Linear ffn_hidden;
  Linear ffn_out;
};

struct DecoderLayerWeights {
  LayerNormWeights self_norm;
  AttentionWeights self_attn;
  LayerNormWeights cross_norm;
  AttentionWeights cross_attn;
  LayerNormWeights ffn_norm;
  Linear ffn_hidden;
  Linear ffn_out;
};

// Every trainable array of the encoder-decoder. Pre-norm residual layers.
//
// Encoder: features -> input_proj, length_token prepended at row 0, learnable
// positions added, encoder layers, final norm. The emission head reads rows
// 1..T, the length head reads row 0.
// Decoder: token embeddings + learnable positions, causal self-attention,
// cross-attention over the encoder memory, feed-forward, final norm, output
// head over letters + EOS + PAD.
struct ModelParams {
  Linear input_proj;
  Eigen::MatrixXd encoder_positions;  // (max_frames + 1) x d_model
  Eigen::MatrixXd length_token;       // 1 x d_model
  std::vector<EncoderLayerWeights> encoder_layers;
  LayerNormWeights encoder_norm;
  Linear emission_head;  // d_model -> letters + blank
  Linear length_head;    // d_model -> 2

  Eigen::MatrixXd token_embedding;    // vocab.size() x d_model
  Eigen::MatrixXd decoder_positions;  // max_letters x d_model
  std::vector<DecoderLayerWeights> decoder_layers;
  LayerNormWeights decoder_norm;
  Linear output_head;  // d_model -> letters + EOS + PAD

  // Calls f(name, matrix) for every array in a fixed order.
  template <typename F>
  void ForEach(F&& f) {
    Visit(*this, f);
  }
  template <typename F>
  void ForEach(F&& f) const {
    Visit(*this, f);
  }

  // Same shapes, all zeros.
  ModelParams ZerosLike() const;
  std::size_t NumValues() const;

 private:
  template <typename Self, typename F>
  static void Visit(Self& p, F& f);
};

// Correct shapes, zero weights, unit norm gains.
ModelParams ZeroParams(const ModelConfig& config);

// Xavier-uniform weights, zero biases, unit norm gains.
ModelParams InitializeParams(const ModelConfig& config, std::uint64_t seed);

// Throws fspell::Error if any array has the wrong shape or a non-finite value.
void ValidateParams(const ModelParams& params, const ModelConfig& config);

struct EncoderOutput {
  Eigen::MatrixXd emissions;  // T x (letters + 1), log-softmax rows
  LengthVector length_pred;
  Eigen::MatrixXd memory;     // (T + 1) x d_model
};

// Read-only passes; safe to run concurrently on a shared parameter snapshot.
EncoderOutput EncoderForward(const ModelParams& params, const ModelConfig& config,
                             const Eigen::MatrixXd& features);

// `tokens` starts with BOS and holds letters after it. Returns one
// log-softmax row over decoder classes per token.
Eigen::MatrixXd DecoderForward(const ModelParams& params, const ModelConfig& config,
                               const Eigen::MatrixXd& memory,
                               std::span<const int> tokens);

struct GradientOptions {
  double lambda = 5.0;
  double loss_scale = 1.0;  // multiplies the loss before backpropagation
  std::mt19937_64* dropout_rng = nullptr;  // null disables dropout
};

// Builds encoder + teacher-forced decoder for one example, evaluates
// lambda * CTC + CE + MSE and, when `gradients` is non-null, adds the exact
// gradient of loss_scale * total into it (shapes as `params`). Examples with
// an unreachable CTC target return skip = true and leave `gradients` alone.
LossBreakdown ComputeGradients(const ModelParams& params, const ModelConfig& config,
                               const Eigen::MatrixXd& features,
                               std::span<const int> target,
                               const GradientOptions& options,
                               ModelParams* gradients,
                               std::string* diagnostic = nullptr);

template <typename Self, typename F>
void ModelParams::Visit(Self& p, F& f) {
  auto linear = [&f](const std::string& name, auto& l) {
    f(name + ".weight", l.weight);
    f(name + ".bias", l.bias);
  };
  auto norm = [&f](const std::string& name, auto& n) {
    f(name + ".gain", n.gain);
    f(name + ".bias", n.bias);
  };
  auto attention = [&linear](const std::string& name, auto& a) {
    linear(name + ".query", a.query);
    linear(name + ".key", a.key);
    linear(name + ".value", a.value);
    linear(name + ".output", a.output);
  };
  linear("encoder.input_proj", p.input_proj);
  f(std::string("encoder.positions"), p.encoder_positions);
  f(std::string("encoder.length_token"), p.length_token);
  for (std::size_t i = 0; i < p.encoder_layers.size(); ++i) {
    const std::string prefix = "encoder.layers." + std::to_string(i);
    auto& layer = p.encoder_layers[i];
    norm(prefix + ".attn_norm", layer.attn_norm);
    attention(prefix + ".self_attn", layer.self_attn);
    norm(prefix + ".ffn_norm", layer.ffn_norm);
    linear(prefix + ".ffn_hidden", layer.ffn_hidden);
    linear(prefix + ".ffn_out", layer.ffn_out);
  }
  norm("encoder.norm", p.encoder_norm);
  linear("encoder.emission_head", p.emission_head);
  linear("encoder.length_head", p.length_head);
  f(std::string("decoder.token_embedding"), p.token_embedding);
  f(std::string("decoder.positions"), p.decoder_positions);
  for (std::size_t i = 0; i < p.decoder_layers.size(); ++i) {
    const std::string prefix = "decoder.layers." + std::to_string(i);
    auto& layer = p.decoder_layers[i];
    norm(prefix + ".self_norm", layer.self_norm);
    attention(prefix + ".self_attn", layer.self_attn);
    norm(prefix + ".cross_norm", layer.cross_norm);
    attention(prefix + ".cross_attn", layer.cross_attn);
    norm(prefix + ".ffn_norm", layer.ffn_norm);
    linear(prefix + ".ffn_hidden", layer.ffn_hidden);
    linear(prefix + ".ffn_out", layer.ffn_out);
  }
  norm("decoder.norm", p.decoder_norm);
  linear("decoder.output_head", p.output_head);
}

}  // namespace fspell

#endif  // FSPELL_MODEL_H_
