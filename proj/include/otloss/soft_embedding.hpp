// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otloss/tensor.hpp"

namespace otloss {

using TokenId = std::size_t;

/// Weighted point set: one embedded token per row of `points`.
struct PointCloud {
  Tensor points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.rows(); }
  std::size_t dim() const noexcept { return points.cols(); }
};

/// Uniform-weight cloud over the rows of `points`.
PointCloud uniform_cloud(Tensor points);

/// Half-open token range [start, end).
struct SpanMask {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start; }
  bool contains(std::size_t t) const noexcept { return t >= start && t < end; }
};

/// Throws InvalidSpan unless 0 <= start < end <= sequence_length.
void validate_span(const SpanMask& span, std::size_t sequence_length);

/// Soft embeddings softmax(logits[t]) . E for every t in the span, with
/// uniform weights.
PointCloud soft_cloud(const Tensor& logits, const Tensor& embeddings, const SpanMask& span);

/// Exact embedding rows E[ids[t]] for every t in the span, uniform weights.
PointCloud hard_cloud(std::span<const TokenId> token_ids, const Tensor& embeddings,
                      const SpanMask& span);

}  // namespace otloss
