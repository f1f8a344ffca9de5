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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "helpers.hpp"
#include "hypernews/optim.hpp"
#include "hypernews/tensor.hpp"

namespace hypernews {
namespace {

using testing::check_gradients;
using testing::random_matrix;
using testing::weighted_sum;

TEST(Autodiff, ProductRule) {
  Parameter x("x", Matrix::Constant(1, 1, 2.0));
  Parameter y("y", Matrix::Constant(1, 1, 3.0));
  Tape tape;
  Var f = hadamard(tape.parameter(x), tape.parameter(y));
  std::vector<Parameter*> ps{&x, &y};
  Gradients g = tape.backward(f, ps);
  EXPECT_DOUBLE_EQ(g.at(x)(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(g.at(y)(0, 0), 2.0);
}

TEST(Autodiff, SumOfSquares) {
  Parameter x("x", (Matrix(1, 2) << 1.0, 2.0).finished());
  Tape tape;
  Var v = tape.parameter(x);
  std::vector<Parameter*> ps{&x};
  Gradients g = tape.backward(sum(hadamard(v, v)), ps);
  EXPECT_DOUBLE_EQ(g.at(x)(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.at(x)(0, 1), 4.0);
}

TEST(Autodiff, UnusedParameterGetsZeroGradient) {
  Parameter x("x", Matrix::Ones(2, 2));
  Parameter unused("u", Matrix::Ones(3, 1));
  Tape tape;
  std::vector<Parameter*> ps{&x, &unused};
  Gradients g = tape.backward(sum(tape.parameter(x)), ps);
  EXPECT_TRUE(g.at(unused).isZero(0.0));
  EXPECT_EQ(g.at(unused).rows(), 3);
}

TEST(Autodiff, RejectsNonScalarAndReuse) {
  Parameter x("x", Matrix::Ones(2, 2));
  std::vector<Parameter*> ps{&x};
  {
    Tape tape;
    EXPECT_THROW(tape.backward(tape.parameter(x), ps), ContractError);
  }
  Tape tape;
  Var s = sum(tape.parameter(x));
  tape.backward(s, ps);
  EXPECT_THROW(tape.backward(s, ps), ContractError);
}

TEST(Autodiff, ShapeMismatchThrows) {
  Tape tape;
  Var a = tape.constant(Matrix::Ones(2, 3));
  Var b = tape.constant(Matrix::Ones(2, 3));
  EXPECT_THROW(matmul(a, b), ContractError);
  EXPECT_THROW(add(a, tape.constant(Matrix::Ones(3, 2))), ContractError);
}

TEST(Softmax, SingletonSupport) {
  Matrix a(1, 1);
  a << 5.0;
  BoolMatrix mask = BoolMatrix::Constant(1, 1, true);
  EXPECT_DOUBLE_EQ(softmax_rows_value(a, mask)(0, 0), 1.0);
}

TEST(Softmax, Symmetric) {
  Matrix a = Matrix::Ones(1, 3);
  Matrix s = softmax_rows_value(a, BoolMatrix::Constant(1, 3, true));
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(s(0, j), 1.0 / 3.0, 1e-15);
}

TEST(Softmax, MaskedMatchesExponentialSum) {
  Matrix a(1, 3);
  a << 1.0, 2.0, 3.0;
  BoolMatrix mask(1, 3);
  mask << true, false, true;
  Matrix s = softmax_rows_value(a, mask);
  const double e2 = std::exp(2.0);
  EXPECT_NEAR(s(0, 0), 1.0 / (1.0 + e2), 1e-15);
  EXPECT_EQ(s(0, 1), 0.0);
  EXPECT_NEAR(s(0, 2), e2 / (1.0 + e2), 1e-15);
  EXPECT_NEAR(s(0, 0), 0.11920292202211755, 1e-15);
}

TEST(Softmax, EmptySupportRowIsZero) {
  Matrix a = Matrix::Ones(2, 2);
  BoolMatrix mask(2, 2);
  mask << false, false, true, false;
  Matrix s = softmax_rows_value(a, mask);
  EXPECT_TRUE(s.row(0).isZero(0.0));
  EXPECT_DOUBLE_EQ(s(1, 0), 1.0);
}

TEST(Cosine, Examples) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_NEAR(cosine(a, a), 1.0, 1e-15);
  const std::vector<double> x{1, 0}, y{0, 1}, z{1, 1};
  EXPECT_DOUBLE_EQ(cosine(x, y), 0.0);
  EXPECT_NEAR(cosine(z, x), 1.0 / std::sqrt(2.0), 1e-15);
  const std::vector<double> zero{0, 0};
  EXPECT_DOUBLE_EQ(cosine(zero, x), 0.0);
}

TEST(Dropout, IdentityInEvalAndAtZeroRate) {
  Rng rng(1);
  Tape tape;
  Matrix m = random_matrix(4, 5, rng);
  Var a = tape.constant(m);
  EXPECT_EQ(dropout(a, 0.5, Mode::kEval, rng).value(), m);
  EXPECT_EQ(dropout(a, 0.0, Mode::kTrain, rng).value(), m);
}

TEST(Dropout, InvertedScalingIsUnbiased) {
  Rng rng(7);
  Tape tape;
  Var a = tape.constant(Matrix::Ones(100, 1000));
  const double m = dropout(a, 0.5, Mode::kTrain, rng).value().mean();
  EXPECT_GE(m, 0.98);
  EXPECT_LE(m, 1.02);
}

TEST(Adam, ZeroGradientLeavesParamsButCountsStep) {
  Parameter p("p", Matrix::Constant(2, 2, 0.3));
  std::vector<Parameter*> ps{&p};
  OptimState st = OptimState::zeros_like(ps);
  std::vector<Matrix> g{Matrix::Zero(2, 2)};
  adam_step(ps, g, st, AdamOptions{});
  EXPECT_EQ(p.value(), Matrix::Constant(2, 2, 0.3));
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, FirstStepIsLearningRate) {
  Parameter p("p", Matrix::Zero(1, 1));
  std::vector<Parameter*> ps{&p};
  OptimState st = OptimState::zeros_like(ps);
  std::vector<Matrix> g{Matrix::Ones(1, 1)};
  adam_step(ps, g, st, AdamOptions{});
  const double d1 = p.value()(0, 0);
  EXPECT_NEAR(d1, -0.001 / (1.0 + 1e-8), 1e-15);
  adam_step(ps, g, st, AdamOptions{});
  const double d2 = p.value()(0, 0) - d1;
  EXPECT_NEAR(std::abs(d2), std::abs(d1), 1e-6);
  EXPECT_EQ(st.step, 2);
  EXPECT_GE(st.second_moment[0].minCoeff(), 0.0);
}

TEST(Adam, RejectsShapeMismatch) {
  Parameter p("p", Matrix::Zero(2, 2));
  std::vector<Parameter*> ps{&p};
  OptimState st = OptimState::zeros_like(ps);
  std::vector<Matrix> g{Matrix::Zero(1, 2)};
  EXPECT_THROW(adam_step(ps, g, st, AdamOptions{}), ContractError);
}

// ---------------------------------------------------------------------------
// Finite-difference checks for every recorded op.

class OpGradient : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(2024);
    a_ = std::make_unique<Parameter>("a", random_matrix(4, 3, rng));
    b_ = std::make_unique<Parameter>("b", random_matrix(4, 3, rng));
    c_ = std::make_unique<Parameter>("c", random_matrix(3, 5, rng));
    row_ = std::make_unique<Parameter>("row", random_matrix(1, 3, rng));
    pos_ = std::make_unique<Parameter>("pos", random_matrix(4, 3, rng, 0.5, 2.0));
    inc_ = std::make_unique<Parameter>("inc", random_matrix(4, 2, rng, 0.1, 1.0));
  }

  void expect_ok(const std::vector<Parameter*>& ps, const std::function<Var(Tape&)>& f) {
    const auto r = check_gradients(ps, f);
    EXPECT_LE(r.max_rel, 1e-6) << "worst coordinate " << r.worst;
  }

  std::unique_ptr<Parameter> a_, b_, c_, row_, pos_, inc_;
};

TEST_F(OpGradient, Linear) {
  expect_ok({a_.get(), c_.get()}, [&](Tape& t) { return weighted_sum(matmul(t.parameter(*a_), t.parameter(*c_)), 1); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(transpose(t.parameter(*a_)), 2); });
  expect_ok({a_.get(), b_.get()}, [&](Tape& t) { return weighted_sum(add(t.parameter(*a_), t.parameter(*b_)), 3); });
  expect_ok({a_.get(), b_.get()}, [&](Tape& t) { return weighted_sum(sub(t.parameter(*a_), t.parameter(*b_)), 4); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(scale(t.parameter(*a_), -1.7), 5); });
}

TEST_F(OpGradient, Elementwise) {
  expect_ok({a_.get(), b_.get()},
            [&](Tape& t) { return weighted_sum(hadamard(t.parameter(*a_), t.parameter(*b_)), 6); });
  expect_ok({a_.get(), row_.get()},
            [&](Tape& t) { return weighted_sum(add_row(t.parameter(*a_), t.parameter(*row_)), 7); });
  expect_ok({a_.get(), row_.get()},
            [&](Tape& t) { return weighted_sum(mul_row(t.parameter(*a_), t.parameter(*row_)), 8); });
  expect_ok({a_.get(), row_.get()},
            [&](Tape& t) { return weighted_sum(scale_by_entry(t.parameter(*a_), t.parameter(*row_), 1), 9); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(relu(t.parameter(*a_)), 10); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(leaky_relu(t.parameter(*a_), 0.2), 11); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(exp(t.parameter(*a_)), 12); });
  expect_ok({pos_.get()}, [&](Tape& t) { return weighted_sum(log_clamped(t.parameter(*pos_), 1e-12), 13); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(clamp(t.parameter(*a_), -0.5, 0.5), 14); });
}

TEST_F(OpGradient, Reductions) {
  expect_ok({a_.get()}, [&](Tape& t) { return sum(t.parameter(*a_)); });
  expect_ok({a_.get()}, [&](Tape& t) { return mean(hadamard(t.parameter(*a_), t.parameter(*a_))); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(row_sums(t.parameter(*a_)), 15); });
  const std::vector<Eigen::Index> rows{3, 0, 3};
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(gather_rows(t.parameter(*a_), rows), 16); });
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> picks{{0, 1}, {2, 2}, {0, 1}};
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(gather_entries(t.parameter(*a_), picks), 17); });
}

TEST_F(OpGradient, Normalization) {
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(normalize_rows(t.parameter(*a_)), 18); });
  expect_ok({a_.get(), b_.get()},
            [&](Tape& t) { return weighted_sum(cosine_matrix(t.parameter(*a_), t.parameter(*b_)), 19); });
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(softmax_rows(t.parameter(*a_)), 20); });
  BoolMatrix mask(4, 3);
  mask << true, false, true, false, false, false, true, true, true, false, true, false;
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(softmax_rows(t.parameter(*a_), mask), 21); });
}

TEST_F(OpGradient, StructuredOps) {
  expect_ok({a_.get()}, [&](Tape& t) {
    Rng rng(99);
    return weighted_sum(dropout(t.parameter(*a_), 0.3, Mode::kTrain, rng), 22);
  });
  auto sp = std::make_shared<SparseMatrix>(3, 4);
  sp->insert(0, 1) = 0.5;
  sp->insert(0, 3) = 0.5;
  sp->insert(2, 0) = 1.0;
  sp->makeCompressed();
  std::shared_ptr<const SparseMatrix> csp = sp;
  expect_ok({a_.get()}, [&](Tape& t) { return weighted_sum(spmm(csp, t.parameter(*a_)), 23); });
  expect_ok({a_.get(), pos_.get()}, [&](Tape& t) {
    Var den = row_sums(t.parameter(*pos_));
    return weighted_sum(div_rows_guarded(t.parameter(*a_), den), 24);
  });
  expect_ok({inc_.get(), a_.get()}, [&](Tape& t) {
    return weighted_sum(weighted_column_mean(t.parameter(*inc_), t.parameter(*a_)), 25);
  });
}

TEST(WeightedColumnMean, Examples) {
  Tape tape;
  Matrix h(2, 2);
  h << 0.5, 0.0, 1.0, 0.0;
  Matrix x(2, 1);
  x << 2.0, 8.0;
  Matrix u = weighted_column_mean(tape.constant(h), tape.constant(x)).value();
  EXPECT_NEAR(u(0, 0), 6.0, 1e-15);
  EXPECT_EQ(u(1, 0), 0.0);
}

}  // namespace
}  // namespace hypernews
