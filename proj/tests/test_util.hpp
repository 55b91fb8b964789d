// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "otloss/tensor.hpp"

namespace otloss::testing {

inline Tensor random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor t(rows, cols);
  for (double& v : t.data()) v = normal(rng);
  return t;
}

inline std::size_t random_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace otloss::testing
