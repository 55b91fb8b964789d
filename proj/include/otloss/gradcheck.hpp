// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otloss/sinkhorn.hpp"
#include "otloss/soft_embedding.hpp"
#include "otloss/tensor.hpp"

namespace otloss {

/// Random small problem: logits T x V, targets, embeddings V x d and a span
/// inside [0, T).
struct GradcheckInstance {
  Tensor logits;
  std::vector<TokenId> targets;
  Tensor embeddings;
  SpanMask span;
};

GradcheckInstance make_gradcheck_instance(std::uint64_t seed);

struct GradcheckEntry {
  std::string loss;
  double max_rel_error = 0.0;
  double threshold = 0.0;
  std::size_t instances = 0;
  bool passed() const { return max_rel_error < threshold; }
};

struct GradcheckOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 20;  // seeds seed, seed+1, ...
  std::string which = "all";   // a loss name or "all"
  bool inject_fault = false;   // perturbs every analytic gradient
};

/// Sinkhorn settings used when checking the topological gradient; tighter
/// than the training defaults so the finite differences see a converged
/// fixed point.
SinkhornConfig gradcheck_sinkhorn();

/// Step size and threshold per loss: ce/focal h=1e-5 < 1e-5, dice h=1e-5
/// < 1e-4, topo h=1e-4 < 1e-3. Throws UnknownComponent for a bad `which`.
std::vector<GradcheckEntry> run_gradcheck(const GradcheckOptions& opts);

}  // namespace otloss
