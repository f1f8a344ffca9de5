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

#include "hypernews/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypernews {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Entrywise clamp to [lo, hi] that keeps NaN, so divergence stays visible.
Matrix clip(const Matrix& m, double lo, double hi) {
  return m.unaryExpr([lo, hi](double x) { return std::isnan(x) ? x : std::clamp(x, lo, hi); });
}

std::string shape_str(const Matrix& m) {
  std::ostringstream os;
  os << "[" << m.rows() << "x" << m.cols() << "]";
  return os.str();
}

void require_same_tape(const Var& a, const Var& b, const char* op) {
  if (!a.valid() || !b.valid()) throw ContractError(std::string(op) + ": invalid Var");
  if (a.tape() != b.tape()) throw ContractError(std::string(op) + ": operands live on different tapes");
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  require_same_tape(a, b, op);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError(std::string(op) + ": shape mismatch " + shape_str(a.value()) + " vs " +
                        shape_str(b.value()));
  }
}

void require_valid(const Var& a, const char* op) {
  if (!a.valid()) throw ContractError(std::string(op) + ": invalid Var");
}

}  // namespace

const Matrix& Var::value() const {
  if (tape_ == nullptr) throw ContractError("Var::value on an unbound Var");
  return tape_->value(id_);
}

bool Var::requires_grad() const { return tape_ != nullptr && tape_->requires_grad(id_); }

const Matrix& Gradients::at(const Parameter& p) const {
  auto it = grads_.find(&p);
  if (it == grads_.end()) throw ContractError("no gradient recorded for parameter '" + p.name() + "'");
  return it->second;
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Parameter& p) {
  if (auto it = bound_.find(&p); it != bound_.end()) return Var(this, it->second);
  Node n;
  n.value = p.value();
  n.requires_grad = mode_ == GradMode::kRecord;
  nodes_.push_back(std::move(n));
  bound_.emplace(&p, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.tape_ != this) throw ContractError("Tape::record: input from a different tape");
    n.requires_grad = n.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Gradients Tape::backward(const Var& output, std::span<Parameter* const> params) {
  if (output.tape_ != this) throw ContractError("backward: output is not recorded on this tape");
  const Node& out = nodes_[output.id_];
  if (out.value.rows() != 1 || out.value.cols() != 1) {
    throw ContractError("backward: output must be scalar, got " + shape_str(out.value));
  }
  if (!out.requires_grad) {
    throw ContractError("backward: output does not depend on any recorded parameter");
  }
  if (consumed_) throw ContractError("backward: tape already consumed");
  consumed_ = true;

  nodes_[output.id_].grad = Matrix::Ones(1, 1);
  for (std::size_t i = output.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
    // Move the gradient out so the closure can't alias it while accumulating.
    Matrix g = std::move(n.grad);
    n.backward(*this, g);
    n.grad = std::move(g);
  }

  Gradients result;
  for (Parameter* p : params) {
    auto it = bound_.find(p);
    if (it != bound_.end() && nodes_[it->second].grad.size() != 0) {
      result.set(*p, nodes_[it->second].grad);
    } else {
      result.set(*p, Matrix::Zero(p->rows(), p->cols()));
    }
  }
  // The tape is single-use; release intermediate storage now.
  for (Node& n : nodes_) {
    n.backward = nullptr;
  }
  return result;
}

Gradients grad(const Var& output, std::span<Parameter* const> params) {
  if (!output.valid()) throw ContractError("grad: output is not recorded on any tape");
  return output.tape()->backward(output, params);
}

// ---------------------------------------------------------------------------

Var matmul(const Var& a, const Var& b) {
  require_same_tape(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw ContractError("matmul: inner dimensions differ " + shape_str(a.value()) + " * " +
                        shape_str(b.value()));
  }
  Tape& t = *a.tape();
  Matrix out = a.value() * b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (a.requires_grad()) tp.accumulate(a, g * b.value().transpose());
    if (b.requires_grad()) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var transpose(const Var& a) {
  require_valid(a, "transpose");
  Matrix out = a.value().transpose();
  return a.tape()->record(std::move(out), {a},
                          [a](Tape& tp, const Matrix& g) { tp.accumulate(a, g.transpose()); });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Matrix out = a.value() + b.value();
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a.value() - b.value();
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, -g);
  });
}

Var hadamard(const Var& a, const Var& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (a.requires_grad()) tp.accumulate(a, g.cwiseProduct(b.value()));
    if (b.requires_grad()) tp.accumulate(b, g.cwiseProduct(a.value()));
  });
}

Var add_row(const Var& a, const Var& row) {
  require_same_tape(a, row, "add_row");
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ContractError("add_row: expected row of shape [1x" + std::to_string(a.cols()) + "], got " +
                        shape_str(row.value()));
  }
  Matrix out = a.value().rowwise() + row.value().row(0);
  return a.tape()->record(std::move(out), {a, row}, [a, row](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    if (row.requires_grad()) tp.accumulate(row, g.colwise().sum());
  });
}

Var mul_row(const Var& a, const Var& row) {
  require_same_tape(a, row, "mul_row");
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ContractError("mul_row: expected row of shape [1x" + std::to_string(a.cols()) + "], got " +
                        shape_str(row.value()));
  }
  Matrix out = a.value().array().rowwise() * row.value().row(0).array();
  return a.tape()->record(std::move(out), {a, row}, [a, row](Tape& tp, const Matrix& g) {
    if (a.requires_grad()) {
      Matrix ga = g.array().rowwise() * row.value().row(0).array();
      tp.accumulate(a, ga);
    }
    if (row.requires_grad()) tp.accumulate(row, g.cwiseProduct(a.value()).colwise().sum());
  });
}

Var scale(const Var& a, double factor) {
  require_valid(a, "scale");
  Matrix out = a.value() * factor;
  return a.tape()->record(std::move(out), {a},
                          [a, factor](Tape& tp, const Matrix& g) { tp.accumulate(a, g * factor); });
}

Var scale_by_entry(const Var& a, const Var& s, Eigen::Index index) {
  require_same_tape(a, s, "scale_by_entry");
  if (s.rows() != 1 || index < 0 || index >= s.cols()) {
    throw ContractError("scale_by_entry: index out of range for " + shape_str(s.value()));
  }
  const double w = s.value()(0, index);
  Matrix out = a.value() * w;
  return a.tape()->record(std::move(out), {a, s}, [a, s, index](Tape& tp, const Matrix& g) {
    if (a.requires_grad()) tp.accumulate(a, g * s.value()(0, index));
    if (s.requires_grad()) {
      Matrix gs = Matrix::Zero(1, s.cols());
      gs(0, index) = g.cwiseProduct(a.value()).sum();
      tp.accumulate(s, gs);
    }
  });
}

Var relu(const Var& a) {
  require_valid(a, "relu");
  Matrix out = clip(a.value(), 0.0, kInf);
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    Matrix ga = (a.value().array() > 0.0).select(g, 0.0);
    tp.accumulate(a, ga);
  });
}

Var leaky_relu(const Var& a, double slope) {
  require_valid(a, "leaky_relu");
  Matrix out = (a.value().array() > 0.0).select(a.value(), a.value() * slope);
  return a.tape()->record(std::move(out), {a}, [a, slope](Tape& tp, const Matrix& g) {
    Matrix ga = (a.value().array() > 0.0).select(g, g * slope);
    tp.accumulate(a, ga);
  });
}

Var exp(const Var& a) {
  require_valid(a, "exp");
  Matrix out = a.value().array().exp().matrix();
  Tape& t = *a.tape();
  // The derivative is the output itself; `self` is the id the result will get.
  const std::size_t self = t.size();
  return t.record(std::move(out), {a}, [a, self](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g.cwiseProduct(tp.value(self)));
  });
}

Var log_clamped(const Var& a, double floor) {
  require_valid(a, "log_clamped");
  Matrix out = clip(a.value(), floor, kInf).array().log().matrix();
  return a.tape()->record(std::move(out), {a}, [a, floor](Tape& tp, const Matrix& g) {
    Matrix ga = (a.value().array() > floor).select(g.array() / a.value().array(), 0.0);
    tp.accumulate(a, ga);
  });
}

Var clamp(const Var& a, double lo, double hi) {
  require_valid(a, "clamp");
  Matrix out = clip(a.value(), lo, hi);
  return a.tape()->record(std::move(out), {a}, [a, lo, hi](Tape& tp, const Matrix& g) {
    Matrix ga = (a.value().array() >= lo && a.value().array() <= hi).select(g, 0.0);
    tp.accumulate(a, ga);
  });
}

Var sum(const Var& a) {
  require_valid(a, "sum");
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var mean(const Var& a) {
  require_valid(a, "mean");
  if (a.value().size() == 0) throw ContractError("mean: empty input");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var row_sums(const Var& a) {
  require_valid(a, "row_sums");
  Matrix out = a.value().rowwise().sum();
  return a.tape()->record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    Matrix ga = g.col(0).replicate(1, a.cols());
    tp.accumulate(a, ga);
  });
}

Var gather_rows(const Var& a, std::span<const Eigen::Index> rows) {
  require_valid(a, "gather_rows");
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw ContractError("gather_rows: row index out of range");
    out.row(static_cast<Eigen::Index>(i)) = a.value().row(rows[i]);
  }
  std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  return a.tape()->record(std::move(out), {a}, [a, idx = std::move(idx)](Tape& tp, const Matrix& g) {
    Matrix ga = Matrix::Zero(a.rows(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) ga.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
    tp.accumulate(a, ga);
  });
}

Var gather_entries(const Var& a, std::span<const std::pair<Eigen::Index, Eigen::Index>> entries) {
  require_valid(a, "gather_entries");
  Matrix out(static_cast<Eigen::Index>(entries.size()), 1);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [r, c] = entries[i];
    if (r < 0 || r >= a.rows() || c < 0 || c >= a.cols()) {
      throw ContractError("gather_entries: index out of range");
    }
    out(static_cast<Eigen::Index>(i), 0) = a.value()(r, c);
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> idx(entries.begin(), entries.end());
  return a.tape()->record(std::move(out), {a}, [a, idx = std::move(idx)](Tape& tp, const Matrix& g) {
    Matrix ga = Matrix::Zero(a.rows(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) ga(idx[i].first, idx[i].second) += g(static_cast<Eigen::Index>(i), 0);
    tp.accumulate(a, ga);
  });
}

Var normalize_rows(const Var& a) {
  require_valid(a, "normalize_rows");
  const Matrix& x = a.value();
  Eigen::VectorXd norms = x.rowwise().norm();
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (norms(r) >= kNormGuard) out.row(r) = x.row(r) / norms(r);
  }
  Tape& t = *a.tape();
  const std::size_t self = t.size();
  return t.record(std::move(out), {a}, [a, self, norms](Tape& tp, const Matrix& g) {
    const Matrix& yv = tp.value(self);
    Matrix ga = Matrix::Zero(g.rows(), g.cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      if (norms(r) < kNormGuard) continue;
      const double proj = yv.row(r).dot(g.row(r));
      ga.row(r) = (g.row(r) - proj * yv.row(r)) / norms(r);
    }
    tp.accumulate(a, ga);
  });
}

Var cosine_matrix(const Var& a, const Var& b) {
  require_same_tape(a, b, "cosine_matrix");
  if (a.cols() != b.cols()) throw ContractError("cosine_matrix: row dimensions differ");
  return matmul(normalize_rows(a), transpose(normalize_rows(b)));
}

Matrix softmax_rows_value(const Matrix& a, const BoolMatrix& mask) {
  if (mask.rows() != a.rows() || mask.cols() != a.cols()) {
    throw ContractError("softmax_rows: mask shape differs from input");
  }
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (mask(r, c)) {
        mx = std::max(mx, a(r, c));
        any = true;
      }
    }
    if (!any) continue;
    double total = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (mask(r, c)) {
        out(r, c) = std::exp(a(r, c) - mx);
        total += out(r, c);
      }
    }
    out.row(r) /= total;
  }
  return out;
}

Var softmax_rows(const Var& a, const BoolMatrix& mask) {
  require_valid(a, "softmax_rows");
  Matrix out = softmax_rows_value(a.value(), mask);
  Tape& t = *a.tape();
  const std::size_t self = t.size();
  return t.record(std::move(out), {a}, [a, self](Tape& tp, const Matrix& g) {
    const Matrix& yv = tp.value(self);
    Eigen::VectorXd dots = yv.cwiseProduct(g).rowwise().sum();
    Matrix ga = yv.cwiseProduct(g - dots.replicate(1, g.cols()));
    tp.accumulate(a, ga);
  });
}

Var softmax_rows(const Var& a) {
  require_valid(a, "softmax_rows");
  return softmax_rows(a, BoolMatrix::Constant(a.rows(), a.cols(), true));
}

Var dropout(const Var& a, double rate, Mode mode, Rng& rng) {
  require_valid(a, "dropout");
  if (rate < 0.0 || rate >= 1.0) throw ContractError("dropout: rate must lie in [0, 1)");
  if (mode == Mode::kEval || rate == 0.0) return a;
  std::bernoulli_distribution keep(1.0 - rate);
  const double inv = 1.0 / (1.0 - rate);
  Matrix mask(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? inv : 0.0;
  Var m = a.tape()->constant(std::move(mask));
  return hadamard(a, m);
}

Var spmm(std::shared_ptr<const SparseMatrix> lhs, const Var& x) {
  require_valid(x, "spmm");
  if (!lhs || lhs->cols() != x.rows()) throw ContractError("spmm: inner dimensions differ");
  Matrix out = (*lhs) * x.value();
  return x.tape()->record(std::move(out), {x}, [lhs, x](Tape& tp, const Matrix& g) {
    Matrix gx = lhs->transpose() * g;
    tp.accumulate(x, gx);
  });
}

Var div_rows_guarded(const Var& num, const Var& den) {
  require_same_tape(num, den, "div_rows_guarded");
  if (den.cols() != 1 || den.rows() != num.rows()) {
    throw ContractError("div_rows_guarded: denominator must be a column with one entry per row");
  }
  const Matrix& n = num.value();
  const Matrix& d = den.value();
  Matrix out = Matrix::Zero(n.rows(), n.cols());
  for (Eigen::Index r = 0; r < n.rows(); ++r) {
    if (d(r, 0) > 0.0) out.row(r) = n.row(r) / d(r, 0);
  }
  return num.tape()->record(std::move(out), {num, den}, [num, den](Tape& tp, const Matrix& g) {
    const Matrix& nv = num.value();
    const Matrix& dv = den.value();
    Matrix gn = Matrix::Zero(nv.rows(), nv.cols());
    Matrix gd = Matrix::Zero(dv.rows(), 1);
    for (Eigen::Index r = 0; r < nv.rows(); ++r) {
      const double d = dv(r, 0);
      if (d <= 0.0) continue;
      gn.row(r) = g.row(r) / d;
      gd(r, 0) = -g.row(r).dot(nv.row(r)) / (d * d);
    }
    if (num.requires_grad()) tp.accumulate(num, gn);
    if (den.requires_grad()) tp.accumulate(den, gd);
  });
}

Var weighted_column_mean(const Var& incidence, const Var& x) {
  require_same_tape(incidence, x, "weighted_column_mean");
  if (incidence.rows() != x.rows()) {
    throw ContractError("weighted_column_mean: incidence rows must match node count");
  }
  Var ht = transpose(incidence);
  return div_rows_guarded(matmul(ht, x), row_sums(ht));
}

// ---------------------------------------------------------------------------

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ContractError("cosine: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  if (nu < kNormGuard || nv < kNormGuard) return 0.0;
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace hypernews
