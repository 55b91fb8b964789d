// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "otloss/tensor.hpp"

namespace otloss {

/// Scalar loss value and its gradient with respect to the logits.
struct LossResult {
  double value = 0.0;
  Tensor grad;
};

}  // namespace otloss
