// Copyright 2026 The hetconv Authors.
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

#include "hetconv/autodiff.hpp"
#include "hetconv/error.hpp"
#include "hetconv/gradcheck.hpp"

namespace hetconv {
namespace {

Matrix random_matrix(long r, long c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

// Weighted sum with fixed random weights so every output entry matters.
Var probe(Var x, const Matrix& w) {
  Tape& t = *x.tape();
  return sum_all(hadamard(x, t.constant(w)));
}

void expect_gradcheck(const ScalarFn& f, std::vector<Matrix> params, double tol = 1e-5) {
  GradcheckReport r = gradcheck(f, params, 1e-5, tol);
  EXPECT_TRUE(r.passed) << "max rel error " << r.max_rel_error;
}

TEST(Matmul, Examples) {
  Tape t;
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  EXPECT_EQ(matmul(t.constant(Matrix::Identity(2, 2)), t.constant(x)).value(), x);
  Matrix a(1, 2), b(2, 1);
  a << 1, 2;
  b << 3, 4;
  EXPECT_DOUBLE_EQ(matmul(t.constant(a), t.constant(b)).value()(0, 0), 11.0);
}

TEST(Matmul, ShapeErrorNamesShapes) {
  Tape t;
  try {
    matmul(t.constant(Matrix::Zero(2, 3)), t.constant(Matrix::Zero(2, 3)));
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("2x3"), std::string::npos);
  }
}

TEST(Matmul, GradientMatchesFiniteDifferences) {
  Rng rng(1);
  Matrix w = random_matrix(3, 2, rng);
  expect_gradcheck([&](Tape&, std::span<const Var> p) { return probe(matmul(p[0], p[1]), w); },
                   {random_matrix(3, 4, rng), random_matrix(4, 2, rng)});
}

TEST(Spmm, Examples) {
  Tape t;
  Matrix b(2, 1);
  b << 2, 4;
  SparseAdj a = SparseAdj::from_triplets(2, 2, {{0, 0, 0.5}, {0, 1, 0.5}});
  Matrix out = spmm(a, t.constant(b)).value();
  EXPECT_DOUBLE_EQ(out(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(out(1, 0), 0.0);  // empty row
}

TEST(Spmm, MatchesDenseProduct) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Triplet> trip;
    for (long i = 0; i < 5; ++i) {
      for (long j = 0; j < 7; ++j) {
        if (rng.bernoulli(0.4)) trip.push_back({i, j, rng.uniform(0.1, 3.0)});
      }
    }
    SparseAdj a = SparseAdj::from_triplets(5, 7, trip);
    Matrix b = random_matrix(7, 3, rng);
    Tape t;
    Matrix got = spmm(a, t.constant(b)).value();
    Matrix want = a.to_dense() * b;
    EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Spmm, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  SparseAdj a = row_normalize(SparseAdj::from_triplets(
      4, 5, {{0, 0, 1.0}, {0, 3, 2.0}, {1, 4, 1.0}, {3, 1, 1.0}, {3, 2, 1.0}}));
  Matrix w = random_matrix(4, 3, rng);
  expect_gradcheck([&](Tape&, std::span<const Var> p) { return probe(spmm(a, p[0]), w); },
                   {random_matrix(5, 3, rng)});
}

TEST(Spmm, ShapeMismatch) {
  Tape t;
  EXPECT_THROW(spmm(SparseAdj(2, 3), t.constant(Matrix::Zero(2, 1))), ShapeError);
}

TEST(Elu, Examples) {
  Tape t;
  Matrix x(1, 3);
  x << 0.0, 2.5, -1.0;
  Matrix y = elu(t.constant(x)).value();
  EXPECT_DOUBLE_EQ(y(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(y(0, 1), 2.5);
  EXPECT_NEAR(y(0, 2), std::exp(-1.0) - 1.0, 1e-15);
  EXPECT_NEAR(y(0, 2), -0.63212, 1e-5);
}

TEST(Elu, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  Matrix w = random_matrix(3, 4, rng);
  expect_gradcheck([&](Tape&, std::span<const Var> p) { return probe(elu(p[0]), w); },
                   {random_matrix(3, 4, rng, -2.0, 2.0)});
}

TEST(Softmax, Examples) {
  Tape t;
  Matrix x(2, 3);
  x << 7, 7, 7, std::log(1.0), std::log(3.0), -1e300;
  Matrix y = softmax_rows(t.constant(x)).value();
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(y(0, j), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(y(1, 0), 0.25, 1e-15);
  EXPECT_NEAR(y(1, 1), 0.75, 1e-15);
  EXPECT_LT(y(1, 2), 1e-300);
}

TEST(Softmax, RowsSumToOneAndShiftInvariant) {
  Rng rng(5);
  Matrix x = random_matrix(50, 6, rng, -50.0, 50.0);
  Matrix shifted = x;
  for (long i = 0; i < x.rows(); ++i) shifted.row(i).array() += rng.uniform(-100.0, 100.0);
  Tape t;
  Matrix y = softmax_rows(t.constant(x)).value();
  Matrix ys = softmax_rows(t.constant(shifted)).value();
  for (long i = 0; i < y.rows(); ++i) EXPECT_NEAR(y.row(i).sum(), 1.0, 1e-9);
  EXPECT_LE((y - ys).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Softmax, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  Matrix w = random_matrix(3, 4, rng);
  expect_gradcheck([&](Tape&, std::span<const Var> p) { return probe(softmax_rows(p[0]), w); },
                   {random_matrix(3, 4, rng, -2.0, 2.0)});
}

TEST(ConcatCols, ShapeAndSplit) {
  Rng rng(7);
  Matrix a = random_matrix(3, 2, rng), b = random_matrix(3, 5, rng);
  Tape t;
  Matrix c = concat_cols(t.constant(a), t.constant(b)).value();
  EXPECT_EQ(c.rows(), 3);
  EXPECT_EQ(c.cols(), 7);
  EXPECT_EQ(Matrix(c.leftCols(2)), a);
  EXPECT_EQ(Matrix(c.rightCols(5)), b);
  EXPECT_THROW(concat_cols(t.constant(a), t.constant(Matrix::Zero(2, 1))), ShapeError);
}

TEST(ConcatCols, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  Matrix w = random_matrix(3, 7, rng);
  expect_gradcheck(
      [&](Tape&, std::span<const Var> p) { return probe(concat_cols(p[0], p[1]), w); },
      {random_matrix(3, 2, rng), random_matrix(3, 5, rng)});
}

TEST(Dropout, IdentityCases) {
  Rng rng(9);
  Matrix x = random_matrix(4, 4, rng);
  Tape t;
  EXPECT_EQ(dropout(t.constant(x), 0.0, true, rng).value(), x);
  EXPECT_EQ(dropout(t.constant(x), 0.0, false, rng).value(), x);
  EXPECT_EQ(dropout(t.constant(x), 0.5, false, rng).value(), x);
}

TEST(Dropout, InvertedScalingPreservesMean) {
  Rng rng(10);
  Tape t;
  Matrix y = dropout(t.constant(Matrix::Ones(1000, 100)), 0.5, true, rng).value();
  EXPECT_NEAR(y.mean(), 1.0, 0.02);
  for (long i = 0; i < y.size(); ++i) {
    const double v = y.data()[i];
    ASSERT_TRUE(v == 0.0 || v == 2.0);
  }
}

TEST(Dropout, RateOutOfRange) {
  Rng rng(11);
  Tape t;
  Var x = t.constant(Matrix::Ones(2, 2));
  EXPECT_THROW(dropout(x, 1.0, true, rng), ConfigError);
  EXPECT_THROW(dropout(x, -0.1, true, rng), ConfigError);
}

TEST(Dropout, FixedMaskGradient) {
  Rng rng(12);
  Matrix mask(3, 4);
  for (long i = 0; i < mask.size(); ++i) mask.data()[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  Matrix w = random_matrix(3, 4, rng);
  expect_gradcheck(
      [&](Tape&, std::span<const Var> p) { return probe(dropout_with_mask(p[0], mask, 0.5), w); },
      {random_matrix(3, 4, rng)});
}

TEST(ElementwiseOps, GradientsMatchFiniteDifferences) {
  Rng rng(13);
  Matrix w = random_matrix(3, 2, rng);
  expect_gradcheck(
      [&](Tape&, std::span<const Var> p) {
        return probe(add(scale(hadamard(p[0], p[1]), 1.7), p[0]), w);
      },
      {random_matrix(3, 2, rng), random_matrix(3, 2, rng)});
}

TEST(RowSelect, ForwardAndGradient) {
  Rng rng(14);
  Matrix x = random_matrix(5, 2, rng);
  std::vector<long> rows = {4, 1, 1};
  Tape t;
  Matrix y = row_select(t.constant(x), rows).value();
  EXPECT_EQ(Matrix(y.row(0)), Matrix(x.row(4)));
  Matrix w = random_matrix(3, 2, rng);
  expect_gradcheck([&](Tape&, std::span<const Var> p) { return probe(row_select(p[0], rows), w); },
                   {x});
}

TEST(WeightedCombine, ForwardAndGradient) {
  Rng rng(15);
  Matrix a = random_matrix(4, 3, rng);
  Matrix z0 = random_matrix(4, 2, rng), z1 = random_matrix(4, 2, rng), z2 = random_matrix(4, 2, rng);
  Tape t;
  std::vector<Var> vals = {t.constant(z0), t.constant(z1), t.constant(z2)};
  Matrix y = weighted_combine(t.constant(a), vals).value();
  for (long i = 0; i < 4; ++i) {
    Eigen::RowVectorXd want = a(i, 0) * z0.row(i) + a(i, 1) * z1.row(i) + a(i, 2) * z2.row(i);
    EXPECT_LE((y.row(i) - want).cwiseAbs().maxCoeff(), 1e-15);
  }
  Matrix w = random_matrix(4, 2, rng);
  expect_gradcheck(
      [&](Tape&, std::span<const Var> p) {
        std::vector<Var> v = {p[1], p[2], p[3]};
        return probe(weighted_combine(p[0], v), w);
      },
      {a, z0, z1, z2});
}

TEST(SoftmaxCrossEntropy, UniformLogitsGiveLogK) {
  Tape t;
  std::vector<long> rows = {0, 1, 2};
  std::vector<int> classes = {0, 3, 1};
  Var loss = softmax_cross_entropy(t.constant(Matrix::Zero(3, 4)), rows, classes);
  EXPECT_NEAR(loss.value()(0, 0), 3.0 * std::log(4.0), 1e-12);
}

TEST(SoftmaxCrossEntropy, GradientAndErrors) {
  Rng rng(16);
  std::vector<long> rows = {0, 2};
  std::vector<int> classes = {1, 2};
  expect_gradcheck(
      [&](Tape&, std::span<const Var> p) { return softmax_cross_entropy(p[0], rows, classes); },
      {random_matrix(3, 3, rng, -3.0, 3.0)});
  Tape t;
  std::vector<int> bad = {1, 5};
  EXPECT_THROW(softmax_cross_entropy(t.constant(Matrix::Zero(3, 3)), rows, bad), DataError);
}

TEST(Xavier, BoundsMeanAndDeterminism) {
  Rng rng(17);
  const double bound = std::sqrt(6.0 / (100.0 + 100.0));
  Matrix a = xavier_uniform(100, 100, rng);
  EXPECT_LE(a.cwiseAbs().maxCoeff(), bound);
  Matrix big = xavier_uniform(1000, 100, rng);
  const double bound_big = std::sqrt(6.0 / 1100.0);
  const double sigma = bound_big / std::sqrt(3.0);
  EXPECT_LE(std::abs(big.mean()), 3.0 * sigma / std::sqrt(1e5));
  Rng r1(99), r2(99);
  EXPECT_EQ(xavier_uniform(7, 3, r1), xavier_uniform(7, 3, r2));
  EXPECT_THROW(xavier_uniform(0, 3, r1), ShapeError);
}

TEST(Gradcheck, SumOfSquares) {
  Matrix x(1, 2);
  x << 1.0, 2.0;
  Tape t;
  Var p = t.parameter(x);
  Var f = sum_all(hadamard(p, p));
  t.backward(f);
  EXPECT_NEAR(p.grad()(0, 0), 2.0, 1e-8);
  EXPECT_NEAR(p.grad()(0, 1), 4.0, 1e-8);
  GradcheckReport r = gradcheck(
      [](Tape&, std::span<const Var> q) { return sum_all(hadamard(q[0], q[0])); },
      std::vector<Matrix>{x}, 1e-5, 1e-8);
  EXPECT_TRUE(r.passed) << r.max_rel_error;
}

TEST(Gradcheck, ConstantFunctionHasZeroGradient) {
  Matrix x = Matrix::Ones(2, 2);
  GradcheckReport r = gradcheck(
      [](Tape& t, std::span<const Var>) { return t.constant(Matrix::Constant(1, 1, 3.0)); },
      std::vector<Matrix>{x}, 1e-5, 1e-8);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_rel_error, 0.0);
}

TEST(Gradcheck, NonFiniteFunctionRejected) {
  Matrix x = Matrix::Ones(1, 1);
  EXPECT_THROW(gradcheck([](Tape& t, std::span<const Var>) {
                 return t.constant(Matrix::Constant(1, 1, std::nan("")));
               },
                         std::vector<Matrix>{x}, 1e-5, 1e-8),
               NumericalError);
}

TEST(Gradcheck, DetectsWrongBackward) {
  // A deliberately wrong primitive: forward x^2, backward claims 3x.
  ScalarFn f = [](Tape& t, std::span<const Var> p) {
    Var x = p[0];
    Matrix v = x.value().array().square();
    Var sq = t.record(v, std::span<const Var>(&x, 1),
                      [x](Tape& tape, const Matrix& g, const Matrix&) {
                        tape.grad_slot(x).array() += g.array() * 3.0 * x.value().array();
                      });
    return sum_all(sq);
  };
  Matrix x(1, 2);
  x << 1.0, 2.0;
  EXPECT_FALSE(gradcheck(f, std::vector<Matrix>{x}, 1e-5, 1e-4).passed);
}

TEST(Tape, ReplayIsBitIdentical) {
  auto run = [] {
    Rng rng(21);
    Tape t;
    Var x = t.parameter(random_matrix(6, 4, rng));
    Var w = t.parameter(random_matrix(4, 3, rng));
    Var h = dropout(elu(matmul(x, w)), 0.5, true, rng);
    return softmax_rows(h).value();
  };
  EXPECT_EQ(run(), run());
}

TEST(Tape, GradientAccumulatesAcrossUses) {
  Tape t;
  Var x = t.parameter(Matrix::Constant(1, 1, 3.0));
  Var f = add(x, scale(x, 2.0));
  t.backward(f);
  EXPECT_DOUBLE_EQ(x.grad()(0, 0), 3.0);
}

}  // namespace
}  // namespace hetconv
