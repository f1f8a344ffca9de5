// Copyright 2026 The hypernews Authors. All Rights Reserved.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hypernews {

// All numerics are double precision and row-major.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Rng = std::mt19937_64;

/// Raised when a caller breaks an operation's precondition (shape mismatch,
/// non-scalar loss, unrecorded output).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Mode { kTrain, kEval };

/// A named trainable matrix. Lives outside any tape; a tape binds to it for
/// the duration of one forward/backward pass.
class Parameter {
 public:
  Parameter(std::string name, Matrix value) : name_(std::move(name)), value_(std::move(value)) {}

  const std::string& name() const { return name_; }
  Matrix& value() { return value_; }
  const Matrix& value() const { return value_; }
  Eigen::Index rows() const { return value_.rows(); }
  Eigen::Index cols() const { return value_.cols(); }

 private:
  std::string name_;
  Matrix value_;
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;
  bool valid() const { return tape_ != nullptr; }

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Gradients keyed by parameter identity.
class Gradients {
 public:
  const Matrix& at(const Parameter& p) const;
  bool contains(const Parameter& p) const { return grads_.count(&p) != 0; }
  void set(const Parameter& p, Matrix g) { grads_[&p] = std::move(g); }
  std::size_t size() const { return grads_.size(); }

 private:
  std::unordered_map<const Parameter*, Matrix> grads_;
};

/// Records one forward pass. Nodes are appended in evaluation order, so the
/// reverse of insertion order is a valid backward schedule.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Matrix&)>;

  enum class GradMode { kRecord, kInference };

  /// kInference binds parameters as constants, so nothing is kept for a backward sweep.
  explicit Tape(GradMode mode = GradMode::kRecord) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Binds `p` to this tape. Binding the same parameter twice returns the same Var.
  Var parameter(Parameter& p);
  /// Appends a node computed from `inputs`. `fn` receives the upstream gradient
  /// and must push contributions into the inputs via accumulate().
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);

  template <typename Derived>
  void accumulate(const Var& v, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[v.id_];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  /// Reverse sweep from the scalar `output`; returns d(output)/d(p) for each
  /// listed parameter (zero for parameters the output does not depend on).
  Gradients backward(const Var& output, std::span<Parameter* const> params);

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    bool requires_grad = false;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> bound_;
  GradMode mode_;
  bool consumed_ = false;
};

/// Convenience wrapper: d(output)/d(params) for a scalar output.
Gradients grad(const Var& output, std::span<Parameter* const> params);

// ---------------------------------------------------------------------------
// Recorded operations. Every op validates shapes and throws ContractError.

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
/// a[r, :] + row for every r; `row` is 1 x cols(a).
Var add_row(const Var& a, const Var& row);
/// a[r, :] .* row for every r; `row` is 1 x cols(a).
Var mul_row(const Var& a, const Var& row);
Var scale(const Var& a, double factor);
/// a * s(0, index) where `s` is a 1 x k row of scalars.
Var scale_by_entry(const Var& a, const Var& s, Eigen::Index index);
Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope);
Var exp(const Var& a);
/// log(max(a, floor)); zero gradient where a <= floor.
Var log_clamped(const Var& a, double floor);
/// Gradient passes where lo <= a <= hi.
Var clamp(const Var& a, double lo, double hi);
Var sum(const Var& a);
Var mean(const Var& a);
/// n x 1 column of row sums.
Var row_sums(const Var& a);
Var gather_rows(const Var& a, std::span<const Eigen::Index> rows);
/// Column vector of a(r_i, c_i).
Var gather_entries(const Var& a, std::span<const std::pair<Eigen::Index, Eigen::Index>> entries);
/// Unit-normalizes each row; rows with norm < kNormGuard map to zero.
Var normalize_rows(const Var& a);
/// Pairwise cosine similarity between rows of a (n x d) and rows of b (m x d): n x m.
Var cosine_matrix(const Var& a, const Var& b);
/// Row-wise softmax restricted to `mask`; masked entries are exactly 0 and
/// rows with empty support are all zero.
Var softmax_rows(const Var& a, const BoolMatrix& mask);
Var softmax_rows(const Var& a);
/// Inverted dropout. Eval mode and rate == 0 return `a` unchanged.
Var dropout(const Var& a, double rate, Mode mode, Rng& rng);
/// Constant sparse matrix times a recorded dense matrix.
Var spmm(std::shared_ptr<const SparseMatrix> lhs, const Var& x);
/// Row j of `num` divided by den(j, 0); rows with den(j, 0) <= 0 become zero.
Var div_rows_guarded(const Var& num, const Var& den);
/// Incidence-weighted mean of node rows per hyperedge:
/// out_j = sum_v H(v,j) x_v / sum_v H(v,j); empty columns give zero rows.
Var weighted_column_mean(const Var& incidence, const Var& x);

inline constexpr double kNormGuard = 1e-12;

// ---------------------------------------------------------------------------
// Plain helpers.

/// Cosine similarity with a zero-norm guard (returns 0 if either norm < 1e-12).
double cosine(std::span<const double> u, std::span<const double> v);

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Row-wise masked softmax on plain values (same contract as the recorded op).
Matrix softmax_rows_value(const Matrix& a, const BoolMatrix& mask);

}  // namespace hypernews
