// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otloss/loss.hpp"
#include "otloss/soft_embedding.hpp"
#include "otloss/tensor.hpp"

namespace otloss {

/// Entropic regularization and stopping rule for Sinkhorn iterations.
/// `epsilon` is in squared-embedding-distance units; `tolerance` bounds the
/// L1 marginal violation of the returned plan.
struct SinkhornConfig {
  double epsilon = 0.05;
  std::size_t max_iters = 200;
  double tolerance = 1e-6;

  void validate() const;
};

struct TransportResult {
  double cost = 0.0;  // <plan, C>, entropy term excluded
  Tensor plan;        // n x m coupling
  std::vector<double> f;
  std::vector<double> g;
  std::size_t iterations_used = 0;
  bool converged = false;
};

/// Pairwise squared Euclidean distances, n x m.
Tensor cost_matrix(const PointCloud& a, const PointCloud& b);

/// Log-domain Sinkhorn between the two weighted clouds on their
/// squared-Euclidean cost matrix. A non-converged solve still returns the
/// last iterate, with converged = false.
TransportResult sinkhorn(const PointCloud& a, const PointCloud& b, const SinkhornConfig& cfg);

/// Same iterations on an explicit cost matrix with the given marginals.
TransportResult sinkhorn(const Tensor& cost, std::span<const double> a_weights,
                         std::span<const double> b_weights, const SinkhornConfig& cfg);

/// d<plan, C>/dC at the Sinkhorn fixed point.
///
/// The plan depends on C through the dual potentials, so the entropic
/// envelope identity (gradient == plan) does not hold for the transport
/// cost alone. The potentials' response is obtained by differentiating the
/// marginal constraints and solving the resulting (n+m) symmetric system,
/// whose one-dimensional gauge null space is removed by a pseudo-inverse.
Tensor transport_cost_gradient(const TransportResult& result, const Tensor& cost,
                               double epsilon);

/// Debiased divergence OT(a,b) - OT(a,a)/2 - OT(b,b)/2.
double sinkhorn_divergence(const PointCloud& a, const PointCloud& b, const SinkhornConfig& cfg);

struct DivergenceResult {
  double value = 0.0;
  Tensor grad_points;  // dS/d(points of a), same shape as a.points
  bool converged = false;
};

/// Divergence plus its gradient with respect to the points of `a`; `b` is
/// held fixed.
DivergenceResult sinkhorn_divergence_with_grad(const PointCloud& a, const PointCloud& b,
                                               const SinkhornConfig& cfg);

/// Divergence between the soft cloud of logits[span_pred] and the hard
/// cloud of target_ids[span_target], with the gradient chained back through
/// the soft points and the softmax. Rows outside span_pred get zero
/// gradient. The embedding table is treated as a constant.
LossResult topological_loss(const Tensor& logits, std::span<const TokenId> target_ids,
                            const Tensor& embeddings, const SpanMask& span_pred,
                            const SpanMask& span_target, const SinkhornConfig& cfg);

}  // namespace otloss
