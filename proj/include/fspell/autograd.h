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

#ifndef FSPELL_AUTOGRAD_H_
#define FSPELL_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

// Minimal tape-based reverse-mode differentiation over dense double matrices.
// A Tape records every operation in creation order, which is already a
// topological order, so Backward() is a single reverse sweep.
namespace fspell::ag {

using Matrix = Eigen::MatrixXd;

class Tape;

// Handle to one node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;
  Tape* tape() const { return tape_; }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  // Receives dLoss/dOutput and the node's own output value.
  using BackwardFn =
      std::function<void(const Matrix& grad_out, const Matrix& output)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf without gradient.
  Var Constant(Matrix value);
  // Leaf that reads `value` in place and accumulates its gradient into
  // `*grad` (which must match the shape) during Backward(). A null `grad`
  // makes it a constant. `value` must outlive the tape.
  Var Parameter(const Matrix& value, Matrix* grad);
  // Interior node. `backward` must route the output gradient to the inputs
  // through Accumulate(). Dropped when no input requires a gradient.
  Var Record(Matrix value, std::span<const Var> inputs, BackwardFn backward);

  // Seeds d(root)/d(root) with `seed` (root must be 1x1) and sweeps backward.
  void Backward(Var root, double seed = 1.0);

  // Adds `delta` into the gradient of `v`, if it requires one.
  template <typename Derived>
  void Accumulate(Var v, const Eigen::MatrixBase<Derived>& delta) {
    Node& node = *nodes_[v.id_];
    if (!node.requires_grad) return;
    Matrix& g = GradRef(node);
    g += delta;
  }

  const Matrix& value(Var v) const { return *nodes_[v.id_]->value; }
  bool requires_grad(Var v) const { return nodes_[v.id_]->requires_grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix storage;
    const Matrix* value = nullptr;
    Matrix grad_storage;
    Matrix* grad = nullptr;  // external for parameters
    bool requires_grad = false;
    BackwardFn backward;
  };

  Matrix& GradRef(Node& node);

  std::vector<std::unique_ptr<Node>> nodes_;
};

inline const Matrix& Var::value() const { return tape_->value(*this); }
inline bool Var::requires_grad() const { return tape_->requires_grad(*this); }

// Linear algebra.
Var MatMul(Var a, Var b);            // a * b
Var MatMulTransposed(Var a, Var b);  // a * b^T
Var Add(Var a, Var b);
Var AddRowBroadcast(Var a, Var row);  // a + 1 * row, row is 1 x cols
Var Scale(Var a, double s);
Var MultiplyConstant(Var a, const Matrix& mask);  // elementwise

// Nonlinearities. Gelu is the exact erf form.
Var Gelu(Var a);
Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
// Row-wise softmax. With `causal`, row i only sees columns 0..i and masked
// entries are exactly zero.
Var Softmax(Var a, bool causal);
Var LogSoftmax(Var a);

// Shape manipulation.
Var SliceRows(Var a, Eigen::Index start, Eigen::Index count);
Var SliceCols(Var a, Eigen::Index start, Eigen::Index count);
Var ConcatRows(Var top, Var bottom);
Var ConcatCols(std::span<const Var> parts);
Var GatherRows(Var table, std::span<const int> ids);

// 1x1 node with a precomputed gradient with respect to `input`.
Var ScalarFunction(Var input, double value, Matrix grad_input);
// sum_i weights[i] * terms[i] for 1x1 terms.
Var WeightedSum(std::span<const Var> terms, std::span<const double> weights);

}  // namespace fspell::ag

#endif  // FSPELL_AUTOGRAD_H_
