// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>

#include "otloss/loss.hpp"
#include "otloss/soft_embedding.hpp"
#include "otloss/tensor.hpp"

namespace otloss {

/// Names accepted in a CompositeSpec: "ce", "focal", "dice", "topo".
inline constexpr const char* kLossNames[] = {"ce", "focal", "dice", "topo"};

bool is_known_loss(const std::string& name);

/// Non-negative mixing weights keyed by loss name. Absent names weigh 0.
struct CompositeSpec {
  std::map<std::string, double> weights;

  double weight(const std::string& name) const;

  /// Throws UnknownComponent on a name outside kLossNames and InvalidConfig
  /// on negative weights or when every weight is zero.
  void validate() const;
};

/// Mean over positions of -log softmax(logits)[t][target_t].
LossResult cross_entropy(const Tensor& logits, std::span<const TokenId> targets);

/// Mean over positions of (1 - p_t)^gamma * -log p_t.
LossResult focal(const Tensor& logits, std::span<const TokenId> targets, double gamma = 2.0);

/// 1 - (2 sum p g + smooth) / (sum p + sum g + smooth) over the flattened
/// T x V softmax and one-hot arrays.
LossResult dice(const Tensor& logits, std::span<const TokenId> targets, double smooth = 1e-6);

/// Weighted sum of pre-evaluated parts. Every name with a nonzero weight
/// must be present in `parts` (MissingComponent otherwise).
LossResult composite(const CompositeSpec& spec, const std::map<std::string, LossResult>& parts);

}  // namespace otloss
