// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "otloss/error.hpp"
#include "otloss/soft_embedding.hpp"
#include "test_util.hpp"

namespace otloss {
namespace {

using testing::random_tensor;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

TEST(SoftCloud, SaturatedRowPicksEmbeddingRow) {
  std::mt19937_64 rng(1);
  const Tensor e = random_tensor(4, 3, rng);
  Tensor logits(1, 4);
  logits(0, 2) = 1e4;
  const PointCloud c = soft_cloud(logits, e, {0, 1});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(c.points(0, k), e(2, k), 1e-9);
}

TEST(SoftCloud, UniformMixtureIsMidpoint) {
  const PointCloud c = soft_cloud(Tensor(1, 2), Tensor(2, 2, {0, 0, 2, 2}), {0, 1});
  EXPECT_DOUBLE_EQ(c.points(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.points(0, 1), 1.0);
}

TEST(SoftCloud, MatchesSoftmaxThenMatmul) {
  std::mt19937_64 rng(2);
  const Tensor logits = random_tensor(3, 5, rng);
  const Tensor e = random_tensor(5, 2, rng);
  const PointCloud c = soft_cloud(logits, e, {0, 3});
  const Tensor p = softmax_rows(logits);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t k = 0; k < 2; ++k) {
      double s = 0.0;
      for (std::size_t v = 0; v < 5; ++v) s += p(t, v) * e(v, k);
      EXPECT_NEAR(c.points(t, k), s, 1e-12);
    }
  ASSERT_EQ(c.weights.size(), 3u);
  for (double w : c.weights) EXPECT_EQ(w, 1.0 / 3.0);
}

TEST(SoftCloud, Errors) {
  const Tensor e(5, 2);
  EXPECT_EQ(kind_of([&] { soft_cloud(Tensor(3, 5), e, {1, 4}); }), ErrorKind::InvalidSpan);
  EXPECT_EQ(kind_of([&] { soft_cloud(Tensor(3, 5), e, {2, 2}); }), ErrorKind::InvalidSpan);
  EXPECT_EQ(kind_of([&] { soft_cloud(Tensor(3, 4), e, {0, 1}); }), ErrorKind::InvalidShape);
}

TEST(HardCloud, LookupAndMask) {
  std::mt19937_64 rng(3);
  const Tensor e = random_tensor(5, 2, rng);
  const std::vector<TokenId> one = {3};
  const PointCloud c = hard_cloud(one, e, {0, 1});
  EXPECT_EQ(c.points(0, 0), e(3, 0));
  EXPECT_EQ(c.points(0, 1), e(3, 1));

  const std::vector<TokenId> twice = {1, 1};
  const PointCloud d = hard_cloud(twice, e, {0, 2});
  EXPECT_EQ(d.points(0, 0), d.points(1, 0));
  EXPECT_EQ(d.weights, (std::vector<double>{0.5, 0.5}));

  const std::vector<TokenId> four = {0, 1, 2, 4};
  const PointCloud m = hard_cloud(four, e, {1, 3});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.points(0, 1), e(1, 1));
  EXPECT_EQ(m.points(1, 1), e(2, 1));
}

TEST(HardCloud, OutOfVocabulary) {
  const std::vector<TokenId> ids = {5};
  EXPECT_EQ(kind_of([&] { hard_cloud(ids, Tensor(5, 2), {0, 1}); }), ErrorKind::InvalidToken);
}

TEST(SoftCloud, SaturatedAgreesWithHardCloudOfArgmax) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor e = random_tensor(6, 3, rng);
    std::vector<TokenId> ids;
    Tensor logits = random_tensor(4, 6, rng, 0.1);
    for (std::size_t t = 0; t < 4; ++t) {
      ids.push_back(testing::random_index(rng, 6));
      logits(t, ids.back()) += 40.0;
    }
    const PointCloud s = soft_cloud(logits, e, {0, 4});
    const PointCloud h = hard_cloud(ids, e, {0, 4});
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      EXPECT_NEAR(s.points.data()[i], h.points.data()[i], 1e-9);
    }
  }
}

}  // namespace
}  // namespace otloss
