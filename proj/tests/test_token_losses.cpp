// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "otloss/error.hpp"
#include "otloss/gradcheck.hpp"
#include "otloss/token_losses.hpp"
#include "test_util.hpp"

namespace otloss {
namespace {

using testing::random_tensor;

std::vector<TokenId> random_targets(std::mt19937_64& rng, std::size_t t, std::size_t v) {
  std::vector<TokenId> ids;
  for (std::size_t i = 0; i < t; ++i) ids.push_back(testing::random_index(rng, v));
  return ids;
}

Tensor saturated(const std::vector<TokenId>& ids, std::size_t v) {
  Tensor logits(ids.size(), v);
  for (std::size_t t = 0; t < ids.size(); ++t) logits(t, ids[t]) = 40.0;
  return logits;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

const std::vector<TokenId> kZero = {0};

TEST(CrossEntropy, UniformTwoWay) {
  EXPECT_NEAR(cross_entropy(Tensor(1, 2), kZero).value, std::log(2.0), 1e-15);
  const std::vector<TokenId> both = {0, 1};
  EXPECT_NEAR(cross_entropy(Tensor(2, 2), both).value, std::log(2.0), 1e-15);
}

TEST(CrossEntropy, Saturated) {
  const std::vector<TokenId> ids = {2, 0, 1};
  const auto r = cross_entropy(saturated(ids, 4), ids);
  EXPECT_LT(r.value, 1e-6);
  EXPECT_LT(max_abs(r.grad), 1e-6);
}

TEST(CrossEntropy, TargetOutOfRange) {
  const std::vector<TokenId> bad = {3};
  EXPECT_EQ(kind_of([&] { cross_entropy(Tensor(1, 3), bad); }), ErrorKind::InvalidToken);
  EXPECT_EQ(kind_of([&] { cross_entropy(Tensor(2, 3), kZero); }), ErrorKind::InvalidShape);
}

TEST(CrossEntropy, RowShiftInvariant) {
  std::mt19937_64 rng(31);
  const Tensor x = random_tensor(3, 5, rng);
  const auto ids = random_targets(rng, 3, 5);
  Tensor y = x;
  for (std::size_t v = 0; v < 5; ++v) y(1, v) += 17.25;
  EXPECT_NEAR(cross_entropy(x, ids).value, cross_entropy(y, ids).value, 1e-12);
}

TEST(Focal, ReducesToCrossEntropyAtGammaZero) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = random_tensor(4, 6, rng, 2.0);
    const auto ids = random_targets(rng, 4, 6);
    const auto f = focal(x, ids, 0.0), c = cross_entropy(x, ids);
    EXPECT_NEAR(f.value, c.value, 1e-12);
    for (std::size_t i = 0; i < f.grad.size(); ++i) {
      EXPECT_NEAR(f.grad.data()[i], c.grad.data()[i], 1e-12);
    }
  }
}

TEST(Focal, HandValueAndSaturation) {
  EXPECT_NEAR(focal(Tensor(1, 2), kZero, 2.0).value, 0.25 * std::log(2.0), 1e-15);
  EXPECT_NEAR(focal(Tensor(1, 2), kZero, 2.0).value, 0.173287, 1e-6);
  const std::vector<TokenId> ids = {1};
  Tensor x(1, 3);
  x(0, 1) = 800.0;
  EXPECT_EQ(focal(x, ids, 2.0).value, 0.0);
}

TEST(Focal, NegativeGammaRejected) {
  EXPECT_EQ(kind_of([] { focal(Tensor(1, 2), kZero, -1.0); }), ErrorKind::InvalidConfig);
}

TEST(Dice, HandValueAndSaturation) {
  const double coeff = (2 * 0.5 + 1e-6) / (1 + 1 + 1e-6);
  EXPECT_NEAR(dice(Tensor(1, 2), kZero, 1e-6).value, 1.0 - coeff, 1e-15);
  EXPECT_NEAR(dice(Tensor(1, 2), kZero, 1e-6).value, 0.5, 1e-6);
  const std::vector<TokenId> ids = {3, 1};
  EXPECT_LE(dice(saturated(ids, 5), ids).value, 1e-6);
}

TEST(Dice, ValueWithinUnitInterval) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor x = random_tensor(3, 4, rng, 5.0);
    const double v = dice(x, random_targets(rng, 3, 4)).value;
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-6);
  }
}

TEST(Dice, NonPositiveSmoothRejected) {
  EXPECT_EQ(kind_of([] { dice(Tensor(1, 2), kZero, 0.0); }), ErrorKind::InvalidConfig);
}

struct GradCase {
  const char* name;
  double threshold;
};

class TokenGradient : public ::testing::TestWithParam<GradCase> {};

TEST_P(TokenGradient, MatchesFiniteDifferencesOnSeededInstances) {
  const GradCase c = GetParam();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = make_gradcheck_instance(seed);
    auto eval = [&](const Tensor& x) {
      const std::string n = c.name;
      if (n == "ce") return cross_entropy(x, inst.targets);
      if (n == "focal") return focal(x, inst.targets, 2.0);
      return dice(x, inst.targets, 1e-6);
    };
    const Tensor numeric =
        finite_diff_grad([&](const Tensor& x) { return eval(x).value; }, inst.logits, 1e-5);
    EXPECT_LT(max_relative_error(eval(inst.logits).grad, numeric), c.threshold)
        << c.name << " seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(Losses, TokenGradient,
                         ::testing::Values(GradCase{"ce", 1e-5}, GradCase{"focal", 1e-5},
                                           GradCase{"dice", 1e-4}),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(Composite, IdentityMix) {
  std::mt19937_64 rng(34);
  const Tensor x = random_tensor(3, 5, rng);
  const auto ids = random_targets(rng, 3, 5);
  const auto ce = cross_entropy(x, ids);
  const auto mixed = composite(CompositeSpec{{{"ce", 1.0}}}, {{"ce", ce}});
  EXPECT_EQ(mixed.value, ce.value);
  EXPECT_EQ(mixed.grad, ce.grad);
}

TEST(Composite, SixtyFortyWeights) {
  const LossResult one{1.0, Tensor(1, 1, {1.0})};
  const LossResult two{2.0, Tensor(1, 1, {-3.0})};
  const auto r = composite(CompositeSpec{{{"ce", 0.6}, {"topo", 0.4}}}, {{"ce", one}, {"topo", two}});
  EXPECT_NEAR(r.value, 1.4, 1e-15);

  std::mt19937_64 rng(35);
  std::map<std::string, LossResult> parts;
  for (const char* n : {"ce", "dice", "topo"}) parts[n] = {1.0, random_tensor(2, 3, rng)};
  const auto m = composite(CompositeSpec{{{"ce", 0.6}, {"dice", 0.2}, {"topo", 0.2}}}, parts);
  EXPECT_NEAR(m.value, 1.0, 1e-15);
  for (std::size_t i = 0; i < m.grad.size(); ++i) {
    const double want = 0.6 * parts["ce"].grad.data()[i] + 0.2 * parts["dice"].grad.data()[i] +
                        0.2 * parts["topo"].grad.data()[i];
    EXPECT_NEAR(m.grad.data()[i], want, 1e-15);
  }
}

TEST(Composite, LinearInWeights) {
  std::mt19937_64 rng(36);
  std::map<std::string, LossResult> parts;
  for (const char* n : {"ce", "focal", "dice", "topo"}) {
    parts[n] = {std::abs(random_tensor(1, 1, rng)(0, 0)), random_tensor(2, 2, rng)};
  }
  const CompositeSpec base{{{"ce", 0.5}, {"focal", 0.25}, {"dice", 0.125}, {"topo", 0.125}}};
  const double v = composite(base, parts).value;
  for (double alpha : {0.5, 2.0, 3.0}) {
    CompositeSpec scaled = base;
    for (auto& [_, w] : scaled.weights) w *= alpha;
    EXPECT_NEAR(composite(scaled, parts).value, alpha * v, 1e-15 * alpha * v);
  }
}

TEST(Composite, Errors) {
  const LossResult one{1.0, Tensor(1, 1)};
  EXPECT_EQ(kind_of([&] { composite(CompositeSpec{{{"ce", 0.6}, {"topo", 0.4}}}, {{"ce", one}}); }),
            ErrorKind::MissingComponent);
  EXPECT_EQ(kind_of([] { CompositeSpec{{{"wasserstein", 1.0}}}.validate(); }),
            ErrorKind::UnknownComponent);
  EXPECT_EQ(kind_of([] { CompositeSpec{{{"ce", -0.1}, {"dice", 1.0}}}.validate(); }),
            ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { CompositeSpec{{{"ce", 0.0}}}.validate(); }), ErrorKind::InvalidConfig);
}

}  // namespace
}  // namespace otloss
