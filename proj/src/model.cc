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

#include "fspell/model.h"

#include <cmath>
#include <unordered_map>

#include "fspell/common.h"

namespace fspell {

using ag::Tape;
using ag::Var;
using Eigen::MatrixXd;

void ModelConfig::Validate() const {
  if (input_dim < 1 || d_model < 1 || n_enc_layers < 1 || n_dec_layers < 1 ||
      n_heads < 1 || ffn_dim < 1 || max_frames < 1 || max_letters < 2) {
    Fail("model config: all sizes must be >= 1 (max_letters >= 2)");
  }
  if (d_model % n_heads != 0) {
    Fail("model config: d_model {} not divisible by n_heads {}", d_model, n_heads);
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    Fail("model config: dropout {} outside [0,1)", dropout);
  }
}

namespace {

Linear ZeroLinear(int in, int out) {
  return {MatrixXd::Zero(in, out), MatrixXd::Zero(1, out)};
}

LayerNormWeights UnitNorm(int d) {
  return {MatrixXd::Ones(1, d), MatrixXd::Zero(1, d)};
}

AttentionWeights ZeroAttention(int d) {
  return {ZeroLinear(d, d), ZeroLinear(d, d), ZeroLinear(d, d), ZeroLinear(d, d)};
}

}  // namespace

ModelParams ZeroParams(const ModelConfig& c) {
  const int d = c.d_model;
  ModelParams p;
  p.input_proj = ZeroLinear(c.input_dim, d);
  p.encoder_positions = MatrixXd::Zero(c.max_frames + 1, d);
  p.length_token = MatrixXd::Zero(1, d);
  p.encoder_layers.resize(c.n_enc_layers);
  for (auto& layer : p.encoder_layers) {
    layer.attn_norm = UnitNorm(d);
    layer.self_attn = ZeroAttention(d);
    layer.ffn_norm = UnitNorm(d);
    layer.ffn_hidden = ZeroLinear(d, c.ffn_dim);
    layer.ffn_out = ZeroLinear(c.ffn_dim, d);
  }
  p.encoder_norm = UnitNorm(d);
  p.emission_head = ZeroLinear(d, c.vocab.num_emission_classes());
  p.length_head = ZeroLinear(d, 2);
  p.token_embedding = MatrixXd::Zero(c.vocab.size(), d);
  p.decoder_positions = MatrixXd::Zero(c.max_letters, d);
  p.decoder_layers.resize(c.n_dec_layers);
  for (auto& layer : p.decoder_layers) {
    layer.self_norm = UnitNorm(d);
    layer.self_attn = ZeroAttention(d);
    layer.cross_norm = UnitNorm(d);
    layer.cross_attn = ZeroAttention(d);
    layer.ffn_norm = UnitNorm(d);
    layer.ffn_hidden = ZeroLinear(d, c.ffn_dim);
    layer.ffn_out = ZeroLinear(c.ffn_dim, d);
  }
  p.decoder_norm = UnitNorm(d);
  p.output_head = ZeroLinear(d, c.vocab.num_decoder_classes());
  return p;
}

namespace {

bool EndsWith(const std::string& s, const char* suffix) {
  const std::string tail(suffix);
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

// Maps parameter arrays to their gradient buffers and hands out one tape leaf
// per array.
class ParamBinder {
 public:
  ParamBinder(Tape& tape, const ModelParams& params, ModelParams* grads)
      : tape_(tape) {
    if (grads == nullptr) return;
    std::vector<const MatrixXd*> values;
    params.ForEach([&](const std::string&, const MatrixXd& m) { values.push_back(&m); });
    std::size_t i = 0;
    grads->ForEach([&](const std::string& name, MatrixXd& g) {
      if (i >= values.size()) Fail("gradient buffer has extra array '{}'", name);
      grads_[values[i++]] = &g;
    });
    if (i != values.size()) Fail("gradient buffer is missing arrays");
  }

  Var operator()(const MatrixXd& m) {
    auto cached = leaves_.find(&m);
    if (cached != leaves_.end()) return cached->second;
    auto g = grads_.find(&m);
    Var leaf = tape_.Parameter(m, g == grads_.end() ? nullptr : g->second);
    leaves_.emplace(&m, leaf);
    return leaf;
  }

 private:
  Tape& tape_;
  std::unordered_map<const MatrixXd*, MatrixXd*> grads_;
  std::unordered_map<const MatrixXd*, Var> leaves_;
};

struct Dropout {
  double rate = 0.0;
  std::mt19937_64* rng = nullptr;

  Var operator()(Var x) const {
    if (rng == nullptr || rate <= 0.0) return x;
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    MatrixXd mask(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
      mask.data()[i] = keep(*rng) ? scale : 0.0;
    }
    return ag::MultiplyConstant(x, mask);
  }
};

Var ApplyLinear(ParamBinder& bind, const Linear& l, Var x) {
  return ag::AddRowBroadcast(ag::MatMul(x, bind(l.weight)), bind(l.bias));
}

Var ApplyNorm(ParamBinder& bind, const LayerNormWeights& n, Var x) {
  return ag::LayerNorm(x, bind(n.gain), bind(n.bias));
}

Var MultiHeadAttention(ParamBinder& bind, const AttentionWeights& w, Var queries,
                       Var context, int heads, bool causal) {
  Var q = ApplyLinear(bind, w.query, queries);
  Var k = ApplyLinear(bind, w.key, context);
  Var v = ApplyLinear(bind, w.value, context);
  const Eigen::Index head_dim = q.cols() / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> outputs;
  outputs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Var qh = ag::SliceCols(q, h * head_dim, head_dim);
    Var kh = ag::SliceCols(k, h * head_dim, head_dim);
    Var vh = ag::SliceCols(v, h * head_dim, head_dim);
    Var scores = ag::Scale(ag::MatMulTransposed(qh, kh), scale);
    outputs.push_back(ag::MatMul(ag::Softmax(scores, causal), vh));
  }
  Var merged = heads == 1 ? outputs[0] : ag::ConcatCols(outputs);
  return ApplyLinear(bind, w.output, merged);
}

Var FeedForward(ParamBinder& bind, const Linear& hidden, const Linear& out, Var x) {
  return ApplyLinear(bind, out, ag::Gelu(ApplyLinear(bind, hidden, x)));
}

struct EncoderGraph {
  Var emissions;
  Var length_pred;
  Var memory;
};

void CheckFeatures(const ModelConfig& config, const MatrixXd& features) {
  if (features.rows() < 1) Fail("encoder: empty pose sequence");
  if (features.rows() > config.max_frames) {
    Fail("encoder: {} frames exceed max_frames {}", features.rows(), config.max_frames);
  }
  if (features.cols() != config.input_dim) {
    Fail("encoder: expected {} features per frame, got {}", config.input_dim,
         features.cols());
  }
  if (!features.allFinite()) Fail("encoder: non-finite input features");
}

EncoderGraph BuildEncoder(Tape& tape, ParamBinder& bind, const ModelParams& p,
                          const ModelConfig& config, const MatrixXd& features,
                          const Dropout& dropout) {
  CheckFeatures(config, features);
  const Eigen::Index frames = features.rows();
  Var x = ApplyLinear(bind, p.input_proj, tape.Constant(features));
  Var h = ag::ConcatRows(bind(p.length_token), x);
  h = ag::Add(h, ag::SliceRows(bind(p.encoder_positions), 0, frames + 1));
  h = dropout(h);
  for (const EncoderLayerWeights& layer : p.encoder_layers) {
    Var a = ApplyNorm(bind, layer.attn_norm, h);
    h = ag::Add(h, dropout(MultiHeadAttention(bind, layer.self_attn, a, a,
                                              config.n_heads, false)));
    Var f = ApplyNorm(bind, layer.ffn_norm, h);
    h = ag::Add(h, dropout(FeedForward(bind, layer.ffn_hidden, layer.ffn_out, f)));
  }
  h = ApplyNorm(bind, p.encoder_norm, h);
  EncoderGraph graph;
  graph.memory = h;
  graph.emissions = ag::LogSoftmax(
      ApplyLinear(bind, p.emission_head, ag::SliceRows(h, 1, frames)));
  graph.length_pred = ApplyLinear(bind, p.length_head, ag::SliceRows(h, 0, 1));
  return graph;
}

void CheckTokens(const ModelConfig& config, std::span<const int> tokens) {
  if (tokens.empty()) Fail("decoder: empty token sequence");
  if (static_cast<int>(tokens.size()) > config.max_letters) {
    Fail("decoder: {} tokens exceed max_letters {}", tokens.size(), config.max_letters);
  }
  if (tokens[0] != config.vocab.bos_id()) Fail("decoder: first token must be BOS");
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (!config.vocab.IsLetter(tokens[i])) {
      Fail("decoder: unknown token id {} at position {}", tokens[i], i);
    }
  }
}

Var BuildDecoder(ParamBinder& bind, const ModelParams& p, const ModelConfig& config,
                 Var memory, std::span<const int> tokens, const Dropout& dropout) {
  CheckTokens(config, tokens);
  const auto length = static_cast<Eigen::Index>(tokens.size());
  Var h = ag::GatherRows(bind(p.token_embedding), tokens);
  h = ag::Add(h, ag::SliceRows(bind(p.decoder_positions), 0, length));
  h = dropout(h);
  for (const DecoderLayerWeights& layer : p.decoder_layers) {
    Var s = ApplyNorm(bind, layer.self_norm, h);
    h = ag::Add(h, dropout(MultiHeadAttention(bind, layer.self_attn, s, s,
                                              config.n_heads, true)));
    Var c = ApplyNorm(bind, layer.cross_norm, h);
    h = ag::Add(h, dropout(MultiHeadAttention(bind, layer.cross_attn, c, memory,
                                              config.n_heads, false)));
    Var f = ApplyNorm(bind, layer.ffn_norm, h);
    h = ag::Add(h, dropout(FeedForward(bind, layer.ffn_hidden, layer.ffn_out, f)));
  }
  h = ApplyNorm(bind, p.decoder_norm, h);
  return ag::LogSoftmax(ApplyLinear(bind, p.output_head, h));
}

}  // namespace

ModelParams ModelParams::ZerosLike() const {
  ModelParams zeros = *this;
  zeros.ForEach([](const std::string&, MatrixXd& m) { m.setZero(); });
  return zeros;
}

std::size_t ModelParams::NumValues() const {
  std::size_t n = 0;
  ForEach([&n](const std::string&, const MatrixXd& m) { n += m.size(); });
  return n;
}

ModelParams InitializeParams(const ModelConfig& config, std::uint64_t seed) {
  config.Validate();
  ModelParams p = ZeroParams(config);
  std::mt19937_64 rng(seed);
  p.ForEach([&rng](const std::string& name, MatrixXd& m) {
    if (EndsWith(name, ".bias") || EndsWith(name, ".gain")) return;
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  });
  return p;
}

void ValidateParams(const ModelParams& params, const ModelConfig& config) {
  config.Validate();
  if (params.encoder_layers.size() != static_cast<std::size_t>(config.n_enc_layers) ||
      params.decoder_layers.size() != static_cast<std::size_t>(config.n_dec_layers)) {
    Fail("parameters: layer counts do not match the config");
  }
  const ModelParams expected = ZeroParams(config);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  expected.ForEach([&](const std::string&, const MatrixXd& m) {
    shapes.emplace_back(m.rows(), m.cols());
  });
  std::size_t i = 0;
  params.ForEach([&](const std::string& name, const MatrixXd& m) {
    if (m.rows() != shapes[i].first || m.cols() != shapes[i].second) {
      Fail("parameter '{}' is {}x{}, expected {}x{}", name, m.rows(), m.cols(),
           shapes[i].first, shapes[i].second);
    }
    if (!m.allFinite()) Fail("parameter '{}' has non-finite values", name);
    ++i;
  });
}

EncoderOutput EncoderForward(const ModelParams& params, const ModelConfig& config,
                             const MatrixXd& features) {
  Tape tape;
  ParamBinder bind(tape, params, nullptr);
  EncoderGraph graph = BuildEncoder(tape, bind, params, config, features, Dropout{});
  EncoderOutput out;
  out.emissions = graph.emissions.value();
  out.length_pred = {graph.length_pred.value()(0, 0), graph.length_pred.value()(0, 1)};
  out.memory = graph.memory.value();
  return out;
}

MatrixXd DecoderForward(const ModelParams& params, const ModelConfig& config,
                        const MatrixXd& memory, std::span<const int> tokens) {
  if (memory.cols() != config.d_model || memory.rows() < 1) {
    Fail("decoder: memory must be N x {}", config.d_model);
  }
  Tape tape;
  ParamBinder bind(tape, params, nullptr);
  Var mem = tape.Constant(memory);
  return BuildDecoder(bind, params, config, mem, tokens, Dropout{}).value();
}

LossBreakdown ComputeGradients(const ModelParams& params, const ModelConfig& config,
                               const MatrixXd& features, std::span<const int> target,
                               const GradientOptions& options, ModelParams* gradients,
                               std::string* diagnostic) {
  const Vocabulary& vocab = config.vocab;
  if (target.empty() || static_cast<int>(target.size()) > kMaxWordLength) {
    Fail("training target length {} outside [1,{}]", target.size(), kMaxWordLength);
  }
  if (static_cast<int>(target.size()) + 1 > config.max_letters) {
    Fail("training target length {} exceeds max_letters - 1", target.size());
  }
  Tape tape;
  ParamBinder bind(tape, params, gradients);
  Dropout dropout{config.dropout, options.dropout_rng};
  EncoderGraph enc = BuildEncoder(tape, bind, params, config, features, dropout);

  LossValue ctc = CtcLoss(enc.emissions.value(), target, vocab.blank_id());
  if (!ctc.finite()) {
    if (diagnostic != nullptr) *diagnostic = ctc.diagnostic;
    return TotalLoss(ctc.value, 0.0, 0.0, options.lambda);
  }
  LossValue mse = LengthMse(enc.length_pred.value(), static_cast<int>(target.size()));

  std::vector<int> tokens;
  tokens.reserve(target.size() + 1);
  tokens.push_back(vocab.bos_id());
  tokens.insert(tokens.end(), target.begin(), target.end());
  std::vector<int> classes(target.begin(), target.end());
  classes.push_back(vocab.eos_class());
  Var dec = BuildDecoder(bind, params, config, enc.memory, tokens, dropout);
  LossValue ce = CrossEntropy(dec.value(), classes);

  LossBreakdown loss = TotalLoss(ctc.value, ce.value, mse.value, options.lambda);
  if (gradients != nullptr) {
    Var terms[] = {
        ag::ScalarFunction(enc.emissions, ctc.value, std::move(ctc.gradient)),
        ag::ScalarFunction(dec, ce.value, std::move(ce.gradient)),
        ag::ScalarFunction(enc.length_pred, mse.value, std::move(mse.gradient)),
    };
    const double weights[] = {options.lambda, 1.0, 1.0};
    tape.Backward(ag::WeightedSum(terms, weights), options.loss_scale);
  }
  return loss;
}

}  // namespace fspell
