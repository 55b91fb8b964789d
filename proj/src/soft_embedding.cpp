// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/soft_embedding.hpp"

#include <fmt/format.h>

#include "otloss/error.hpp"

namespace otloss {

PointCloud uniform_cloud(Tensor points) {
  if (points.rows() == 0) throw Error(ErrorKind::InvalidShape, "point cloud needs >= 1 point");
  const std::size_t n = points.rows();
  return PointCloud{std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void validate_span(const SpanMask& span, std::size_t sequence_length) {
  if (!(span.start < span.end && span.end <= sequence_length)) {
    throw Error(ErrorKind::InvalidSpan, fmt::format("span [{}, {}) invalid for sequence length {}",
                                                    span.start, span.end, sequence_length));
  }
}

PointCloud soft_cloud(const Tensor& logits, const Tensor& embeddings, const SpanMask& span) {
  if (logits.cols() != embeddings.rows()) {
    throw Error(ErrorKind::InvalidShape,
                fmt::format("logits have {} columns but embedding table has {} rows",
                            logits.cols(), embeddings.rows()));
  }
  validate_span(span, logits.rows());
  Tensor spanned(span.length(), logits.cols());
  for (std::size_t t = span.start; t < span.end; ++t) {
    auto src = logits.row(t);
    std::copy(src.begin(), src.end(), spanned.row(t - span.start).begin());
  }
  return uniform_cloud(matmul(softmax_rows(spanned), embeddings));
}

PointCloud hard_cloud(std::span<const TokenId> token_ids, const Tensor& embeddings,
                      const SpanMask& span) {
  validate_span(span, token_ids.size());
  Tensor points(span.length(), embeddings.cols());
  for (std::size_t t = span.start; t < span.end; ++t) {
    const TokenId id = token_ids[t];
    if (id >= embeddings.rows()) {
      throw Error(ErrorKind::InvalidToken, fmt::format("token id {} at position {} outside vocabulary of {}",
                                                       id, t, embeddings.rows()));
    }
    auto src = embeddings.row(id);
    std::copy(src.begin(), src.end(), points.row(t - span.start).begin());
  }
  return uniform_cloud(std::move(points));
}

}  // namespace otloss
