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

#include "fspell/autograd.h"

#include <cmath>
#include <numbers>

#include "fspell/common.h"

namespace fspell::ag {

Var Tape::Constant(Matrix value) {
  auto node = std::make_unique<Node>();
  node->storage = std::move(value);
  node->value = &node->storage;
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Parameter(const Matrix& value, Matrix* grad) {
  auto node = std::make_unique<Node>();
  node->value = &value;
  if (grad != nullptr) {
    if (grad->rows() != value.rows() || grad->cols() != value.cols()) {
      Fail("gradient buffer shape {}x{} does not match parameter {}x{}",
           grad->rows(), grad->cols(), value.rows(), value.cols());
    }
    node->grad = grad;
    node->requires_grad = true;
  }
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(Matrix value, std::span<const Var> inputs, BackwardFn backward) {
  auto node = std::make_unique<Node>();
  node->storage = std::move(value);
  node->value = &node->storage;
  for (const Var& in : inputs) {
    if (in.tape_ != this) Fail("autograd: mixing variables from different tapes");
    node->requires_grad = node->requires_grad || nodes_[in.id_]->requires_grad;
  }
  if (node->requires_grad) node->backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Tape::GradRef(Node& node) {
  if (node.grad != nullptr) return *node.grad;
  node.grad_storage = Matrix::Zero(node.value->rows(), node.value->cols());
  node.grad = &node.grad_storage;
  return node.grad_storage;
}

void Tape::Backward(Var root, double seed) {
  Node& root_node = *nodes_[root.id_];
  if (root_node.value->size() != 1) Fail("Backward() needs a scalar root");
  if (!root_node.requires_grad) return;
  GradRef(root_node)(0, 0) += seed;
  for (int i = root.id_; i >= 0; --i) {
    Node& node = *nodes_[i];
    if (!node.backward || node.grad == nullptr) continue;
    node.backward(*node.grad, *node.value);
  }
}

namespace {

Tape& TapeOf(Var a) { return *a.tape(); }

void CheckSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    Fail("{}: shape mismatch {}x{} vs {}x{}", op, a.rows(), a.cols(), b.rows(),
         b.cols());
  }
}

}  // namespace

Var MatMul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    Fail("MatMul: inner dimensions {} vs {}", a.cols(), b.rows());
  }
  Tape& tape = TapeOf(a);
  Var inputs[] = {a, b};
  return tape.Record(a.value() * b.value(), inputs, [&tape, a, b](const Matrix& g, const Matrix&) {
    if (a.requires_grad()) tape.Accumulate(a, g * b.value().transpose());
    if (b.requires_grad()) tape.Accumulate(b, a.value().transpose() * g);
  });
}

Var MatMulTransposed(Var a, Var b) {
  if (a.cols() != b.cols()) {
    Fail("MatMulTransposed: inner dimensions {} vs {}", a.cols(), b.cols());
  }
  Tape& tape = TapeOf(a);
  Var inputs[] = {a, b};
  return tape.Record(a.value() * b.value().transpose(), inputs,
                     [&tape, a, b](const Matrix& g, const Matrix&) {
                       if (a.requires_grad()) tape.Accumulate(a, g * b.value());
                       if (b.requires_grad()) {
                         tape.Accumulate(b, g.transpose() * a.value());
                       }
                     });
}

Var Add(Var a, Var b) {
  CheckSameShape(a.value(), b.value(), "Add");
  Tape& tape = TapeOf(a);
  Var inputs[] = {a, b};
  return tape.Record(a.value() + b.value(), inputs, [&tape, a, b](const Matrix& g, const Matrix&) {
    tape.Accumulate(a, g);
    tape.Accumulate(b, g);
  });
}

Var AddRowBroadcast(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    Fail("AddRowBroadcast: row is {}x{}, expected 1x{}", row.rows(), row.cols(),
         a.cols());
  }
  Tape& tape = TapeOf(a);
  Var inputs[] = {a, row};
  Matrix out = a.value().rowwise() + row.value().row(0);
  return tape.Record(std::move(out), inputs, [&tape, a, row](const Matrix& g, const Matrix&) {
    tape.Accumulate(a, g);
    if (row.requires_grad()) tape.Accumulate(row, g.colwise().sum());
  });
}

Var Scale(Var a, double s) {
  Tape& tape = TapeOf(a);
  Var inputs[] = {a};
  return tape.Record(a.value() * s, inputs,
                     [&tape, a, s](const Matrix& g, const Matrix&) { tape.Accumulate(a, g * s); });
}

Var MultiplyConstant(Var a, const Matrix& mask) {
  CheckSameShape(a.value(), mask, "MultiplyConstant");
  Tape& tape = TapeOf(a);
  Var inputs[] = {a};
  return tape.Record(a.value().cwiseProduct(mask), inputs,
                     [&tape, a, mask](const Matrix& g, const Matrix&) {
                       tape.Accumulate(a, g.cwiseProduct(mask));
                     });
}

Var Gelu(Var a) {
  Tape& tape = TapeOf(a);
  const Matrix& x = a.value();
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  Matrix cdf = x.unaryExpr([](double v) { return 0.5 * (1.0 + std::erf(v * kInvSqrt2)); });
  Matrix out = x.cwiseProduct(cdf);
  Var inputs[] = {a};
  return tape.Record(std::move(out), inputs, [&tape, a, cdf](const Matrix& g, const Matrix&) {
    const double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    const Matrix& x = a.value();
    Matrix pdf = x.unaryExpr(
        [kInvSqrt2Pi](double v) { return kInvSqrt2Pi * std::exp(-0.5 * v * v); });
    Matrix dx = cdf + x.cwiseProduct(pdf);
    tape.Accumulate(a, g.cwiseProduct(dx));
  });
}

Var LayerNorm(Var x, Var gain, Var bias, double eps) {
  const Eigen::Index n = x.cols();
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n) {
    Fail("LayerNorm: gain/bias must be 1x{}", n);
  }
  Tape& tape = TapeOf(x);
  const Matrix& in = x.value();
  Matrix normalized(in.rows(), n);
  Eigen::VectorXd inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double mean = in.row(r).mean();
    const double var = (in.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    normalized.row(r) = (in.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = (normalized.array().rowwise() * gain.value().row(0).array()).matrix();
  out.rowwise() += bias.value().row(0);
  Var inputs[] = {x, gain, bias};
  return tape.Record(
      std::move(out), inputs,
      [&tape, x, gain, bias, normalized, inv_std, n](const Matrix& g, const Matrix&) {
        if (gain.requires_grad()) {
          tape.Accumulate(gain, g.cwiseProduct(normalized).colwise().sum());
        }
        if (bias.requires_grad()) tape.Accumulate(bias, g.colwise().sum());
        if (!x.requires_grad()) return;
        Matrix gn = (g.array().rowwise() * gain.value().row(0).array()).matrix();
        Matrix dx(g.rows(), n);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
          const double mean_g = gn.row(r).mean();
          const double mean_gx = gn.row(r).dot(normalized.row(r)) / n;
          dx.row(r) = (gn.row(r).array() - mean_g - normalized.row(r).array() * mean_gx) *
                      inv_std(r);
        }
        tape.Accumulate(x, dx);
      });
}

Var Softmax(Var a, bool causal) {
  Tape& tape = TapeOf(a);
  const Matrix& in = a.value();
  Matrix out = Matrix::Zero(in.rows(), in.cols());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const Eigen::Index width = causal ? std::min(r + 1, in.cols()) : in.cols();
    auto row = in.row(r).head(width);
    const double max = row.maxCoeff();
    Eigen::RowVectorXd e = (row.array() - max).exp();
    out.row(r).head(width) = e / e.sum();
  }
  Var inputs[] = {a};
  return tape.Record(std::move(out), inputs,
                     [&tape, a](const Matrix& g, const Matrix& y) {
                       // dx = y * (g - sum(g * y)); masked entries have y = 0.
                       Eigen::VectorXd dots = g.cwiseProduct(y).rowwise().sum();
                       Matrix dx = y.cwiseProduct(g.colwise() - dots);
                       tape.Accumulate(a, dx);
                     });
}

Var LogSoftmax(Var a) {
  Tape& tape = TapeOf(a);
  const Matrix& in = a.value();
  Matrix out(in.rows(), in.cols());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double max = in.row(r).maxCoeff();
    const double lse = max + std::log((in.row(r).array() - max).exp().sum());
    out.row(r) = in.row(r).array() - lse;
  }
  Var inputs[] = {a};
  return tape.Record(std::move(out), inputs,
                     [&tape, a](const Matrix& g, const Matrix& y) {
                       Eigen::VectorXd sums = g.rowwise().sum();
                       Matrix dx = g - (y.array().exp().colwise() * sums.array()).matrix();
                       tape.Accumulate(a, dx);
                     });
}

Var SliceRows(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    Fail("SliceRows: [{}, {}) out of range for {} rows", start, start + count,
         a.rows());
  }
  Tape& tape = TapeOf(a);
  Var inputs[] = {a};
  const Eigen::Index rows = a.rows(), cols = a.cols();
  return tape.Record(a.value().middleRows(start, count), inputs,
                     [&tape, a, start, count, rows, cols](const Matrix& g, const Matrix&) {
                       Matrix full = Matrix::Zero(rows, cols);
                       full.middleRows(start, count) = g;
                       tape.Accumulate(a, full);
                     });
}

Var SliceCols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    Fail("SliceCols: [{}, {}) out of range for {} cols", start, start + count,
         a.cols());
  }
  Tape& tape = TapeOf(a);
  Var inputs[] = {a};
  const Eigen::Index rows = a.rows(), cols = a.cols();
  return tape.Record(a.value().middleCols(start, count), inputs,
                     [&tape, a, start, count, rows, cols](const Matrix& g, const Matrix&) {
                       Matrix full = Matrix::Zero(rows, cols);
                       full.middleCols(start, count) = g;
                       tape.Accumulate(a, full);
                     });
}

Var ConcatRows(Var top, Var bottom) {
  if (top.cols() != bottom.cols()) {
    Fail("ConcatRows: column counts {} vs {}", top.cols(), bottom.cols());
  }
  Tape& tape = TapeOf(top);
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top.value(), bottom.value();
  Var inputs[] = {top, bottom};
  const Eigen::Index split = top.rows();
  return tape.Record(std::move(out), inputs,
                     [&tape, top, bottom, split](const Matrix& g, const Matrix&) {
                       tape.Accumulate(top, g.topRows(split));
                       tape.Accumulate(bottom, g.bottomRows(g.rows() - split));
                     });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) Fail("ConcatCols: nothing to concatenate");
  Tape& tape = TapeOf(parts[0]);
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) Fail("ConcatCols: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  std::vector<Var> captured(parts.begin(), parts.end());
  return tape.Record(std::move(out), parts,
                     [&tape, captured](const Matrix& g, const Matrix&) {
                       Eigen::Index offset = 0;
                       for (const Var& p : captured) {
                         tape.Accumulate(p, g.middleCols(offset, p.cols()));
                         offset += p.cols();
                       }
                     });
}

Var GatherRows(Var table, std::span<const int> ids) {
  Tape& tape = TapeOf(table);
  Matrix out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows()) {
      Fail("GatherRows: id {} outside table of {} rows", ids[i], table.rows());
    }
    out.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  std::vector<int> captured(ids.begin(), ids.end());
  Var inputs[] = {table};
  const Eigen::Index rows = table.rows(), cols = table.cols();
  return tape.Record(std::move(out), inputs,
                     [&tape, table, captured, rows, cols](const Matrix& g, const Matrix&) {
                       Matrix full = Matrix::Zero(rows, cols);
                       for (std::size_t i = 0; i < captured.size(); ++i) {
                         full.row(captured[i]) += g.row(static_cast<Eigen::Index>(i));
                       }
                       tape.Accumulate(table, full);
                     });
}

Var ScalarFunction(Var input, double value, Matrix grad_input) {
  CheckSameShape(input.value(), grad_input, "ScalarFunction");
  Tape& tape = TapeOf(input);
  Var inputs[] = {input};
  return tape.Record(Matrix::Constant(1, 1, value), inputs,
                     [&tape, input, grad_input](const Matrix& g, const Matrix&) {
                       tape.Accumulate(input, grad_input * g(0, 0));
                     });
}

Var WeightedSum(std::span<const Var> terms, std::span<const double> weights) {
  if (terms.empty() || terms.size() != weights.size()) {
    Fail("WeightedSum: {} terms with {} weights", terms.size(), weights.size());
  }
  Tape& tape = TapeOf(terms[0]);
  double total = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].value().size() != 1) Fail("WeightedSum: terms must be 1x1");
    total += weights[i] * terms[i].value()(0, 0);
  }
  std::vector<Var> captured_terms(terms.begin(), terms.end());
  std::vector<double> captured_weights(weights.begin(), weights.end());
  return tape.Record(Matrix::Constant(1, 1, total), terms,
                     [&tape, captured_terms, captured_weights](const Matrix& g,
                                                              const Matrix&) {
                       for (std::size_t i = 0; i < captured_terms.size(); ++i) {
                         tape.Accumulate(captured_terms[i],
                                         Matrix::Constant(1, 1, captured_weights[i] * g(0, 0)));
                       }
                     });
}

}  // namespace fspell::ag
