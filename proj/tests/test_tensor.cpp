// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "otloss/error.hpp"
#include "otloss/tensor.hpp"
#include "otloss/token_losses.hpp"
#include "test_util.hpp"

namespace otloss {
namespace {

using testing::random_tensor;

Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

TEST(Tensor, RejectsDataLengthMismatch) {
  EXPECT_THROW(Tensor(2, 2, {1.0, 2.0, 3.0}), Error);
}

TEST(Softmax, UniformRow) {
  const Tensor p = softmax_rows(Tensor(1, 2, {0.0, 0.0}));
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
}

TEST(Softmax, LargeLogitDoesNotOverflow) {
  const Tensor p = softmax_rows(Tensor(1, 2, {1000.0, 0.0}));
  EXPECT_EQ(p(0, 0), 1.0);
  EXPECT_EQ(p(0, 1), 0.0);
}

TEST(Softmax, MatchesHighPrecisionValues) {
  // 60-digit evaluation (tests/oracles/sinkhorn_2x2.py).
  const Tensor p = softmax_rows(Tensor(1, 3, {1.0, 2.0, 3.0}));
  EXPECT_NEAR(p(0, 0), 0.0900305731704, 1e-12);
  EXPECT_NEAR(p(0, 1), 0.244728471055, 1e-12);
  EXPECT_NEAR(p(0, 2), 0.665240955775, 1e-12);
}

TEST(Softmax, EmptyThrows) {
  try {
    softmax_rows(Tensor());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidShape);
  }
}

TEST(Softmax, RowsSumToOneIncludingExtremeEntries) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x = random_tensor(4, 7, rng, 3.0);
    x(0, 0) = 1e4;
    x(1, 3) = -1e4;
    x(2, 1) = 1e4;
    x(2, 2) = -1e4;
    const Tensor p = softmax_rows(x);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double s = 0.0;
      for (double v : p.row(r)) {
        EXPECT_GE(v, 0.0);
        s += v;
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Softmax, ShiftInvariant) {
  std::mt19937_64 rng(12);
  for (double c : {-50.0, -1.5, 0.25, 30.0}) {
    const Tensor x = random_tensor(3, 5, rng);
    Tensor y = x;
    for (double& v : y.data()) v += c;
    const Tensor px = softmax_rows(x), py = softmax_rows(y);
    for (std::size_t i = 0; i < px.size(); ++i) EXPECT_NEAR(px.data()[i], py.data()[i], 1e-12);
  }
}

TEST(LogSoftmax, AgreesWithLogOfSoftmax) {
  std::mt19937_64 rng(13);
  const Tensor x = random_tensor(3, 4, rng);
  const Tensor p = softmax_rows(x), lp = log_softmax_rows(x);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(lp.data()[i], std::log(p.data()[i]), 1e-12);
}

TEST(SoftmaxBackward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(14);
  const Tensor x = random_tensor(2, 4, rng);
  const Tensor w = random_tensor(2, 4, rng);
  auto f = [&](const Tensor& z) {
    const Tensor p = softmax_rows(z);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += w.data()[i] * p.data()[i];
    return s;
  };
  const Tensor analytic = softmax_rows_backward(softmax_rows(x), w);
  EXPECT_LT(max_relative_error(analytic, finite_diff_grad(f, x)), 1e-6);
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Tensor eye(2, 2, {1, 0, 0, 1});
  const Tensor m(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(matmul(eye, m), m);
}

TEST(Matmul, ConvexCombinationRows) {
  const Tensor a(3, 2, {1, 0, 0, 1, 0.5, 0.5});
  const Tensor b(2, 2, {2, 0, 0, 4});
  EXPECT_EQ(matmul(a, b), Tensor(3, 2, {2, 0, 0, 4, 1, 2}));
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 rng(15);
  for (std::size_t n = 1; n <= 16; n += 3) {
    const Tensor a = random_tensor(n, 16 - n + 1, rng);
    const Tensor b = random_tensor(16 - n + 1, n + 1, rng);
    const Tensor got = matmul(a, b), want = naive_matmul(a, b);
    ASSERT_TRUE(got.same_shape(want));
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got.data()[i], want.data()[i], 1e-12 * std::max(1.0, std::abs(want.data()[i])));
    }
  }
}

TEST(Matmul, DimensionMismatchThrows) {
  EXPECT_THROW(matmul(Tensor(2, 3), Tensor(2, 3)), Error);
}

TEST(FiniteDiff, SumOfSquares) {
  auto f = [](const Tensor& x) {
    double s = 0.0;
    for (double v : x.data()) s += v * v;
    return s;
  };
  const Tensor g = finite_diff_grad(f, Tensor(1, 2, {1.0, 2.0}), 1e-5);
  EXPECT_NEAR(g(0, 0), 2.0, 1e-6);
  EXPECT_NEAR(g(0, 1), 4.0, 1e-6);
}

TEST(FiniteDiff, ConstantHasZeroGradient) {
  const Tensor g = finite_diff_grad([](const Tensor&) { return 3.5; }, Tensor(2, 2, {1, 2, 3, 4}));
  EXPECT_LE(max_abs(g), 1e-9);
}

TEST(FiniteDiff, NonFiniteEvaluationThrows) {
  auto f = [](const Tensor& x) { return std::log(x(0, 0)); };
  try {
    finite_diff_grad(f, Tensor(1, 1, {0.0}), 1e-5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NumericalFailure);
  }
}

TEST(FiniteDiff, AgreesWithCrossEntropyGradient) {
  std::mt19937_64 rng(16);
  const Tensor x = random_tensor(2, 5, rng);
  const std::vector<TokenId> targets = {1, 4};
  const auto ce = cross_entropy(x, targets);
  const Tensor numeric =
      finite_diff_grad([&](const Tensor& z) { return cross_entropy(z, targets).value; }, x);
  EXPECT_LT(max_relative_error(ce.grad, numeric), 1e-4);
}

TEST(MaxRelativeError, UsesFloorNearZero) {
  EXPECT_DOUBLE_EQ(max_relative_error(Tensor(1, 1, {0.0}), Tensor(1, 1, {1e-10}), 1e-8), 1e-2);
  EXPECT_DOUBLE_EQ(max_relative_error(Tensor(1, 1, {2.0}), Tensor(1, 1, {1.0})), 0.5);
}

}  // namespace
}  // namespace otloss
