// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/token_losses.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "otloss/error.hpp"

namespace otloss {
namespace {

void check_targets(const Tensor& logits, std::span<const TokenId> targets) {
  if (logits.empty()) throw Error(ErrorKind::InvalidShape, "empty logits");
  if (targets.size() != logits.rows()) {
    throw Error(ErrorKind::InvalidShape, fmt::format("{} targets for {} logit rows",
                                                     targets.size(), logits.rows()));
  }
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] >= logits.cols()) {
      throw Error(ErrorKind::InvalidToken, fmt::format("target {} at position {} outside vocabulary of {}",
                                                       targets[t], t, logits.cols()));
    }
  }
}

}  // namespace

bool is_known_loss(const std::string& name) {
  return std::any_of(std::begin(kLossNames), std::end(kLossNames),
                     [&](const char* n) { return name == n; });
}

double CompositeSpec::weight(const std::string& name) const {
  auto it = weights.find(name);
  return it == weights.end() ? 0.0 : it->second;
}

void CompositeSpec::validate() const {
  bool any_positive = false;
  for (const auto& [name, w] : weights) {
    if (!is_known_loss(name)) {
      throw Error(ErrorKind::UnknownComponent, fmt::format("unknown loss name '{}'", name));
    }
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("weight for '{}' must be >= 0", name));
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw Error(ErrorKind::InvalidConfig, "composite needs a positive weight");
}

LossResult cross_entropy(const Tensor& logits, std::span<const TokenId> targets) {
  check_targets(logits, targets);
  const Tensor logp = log_softmax_rows(logits);
  const Tensor probs = softmax_rows(logits);
  const double inv_t = 1.0 / static_cast<double>(logits.rows());

  LossResult out{0.0, Tensor(logits.rows(), logits.cols())};
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    out.value -= logp(t, targets[t]);
    for (std::size_t v = 0; v < logits.cols(); ++v) {
      out.grad(t, v) = (probs(t, v) - (v == targets[t] ? 1.0 : 0.0)) * inv_t;
    }
  }
  out.value *= inv_t;
  return out;
}

LossResult focal(const Tensor& logits, std::span<const TokenId> targets, double gamma) {
  if (!(gamma >= 0.0)) throw Error(ErrorKind::InvalidConfig, "focal gamma must be >= 0");
  check_targets(logits, targets);
  const Tensor logp = log_softmax_rows(logits);
  const Tensor probs = softmax_rows(logits);
  const double inv_t = 1.0 / static_cast<double>(logits.rows());

  LossResult out{0.0, Tensor(logits.rows(), logits.cols())};
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    const double lp = logp(t, targets[t]);
    const double p = std::exp(lp);
    const double one_minus_p = -std::expm1(lp);
    const double modulator = gamma == 0.0 ? 1.0 : std::pow(one_minus_p, gamma);
    out.value += modulator * -lp;

    // dL/dz_v = c * (delta_v - p_v) with c = p dL/dp.
    double c = -modulator;
    if (gamma != 0.0 && one_minus_p > 0.0) {
      c += gamma * std::pow(one_minus_p, gamma - 1.0) * p * lp;
    }
    for (std::size_t v = 0; v < logits.cols(); ++v) {
      out.grad(t, v) = -c * (probs(t, v) - (v == targets[t] ? 1.0 : 0.0)) * inv_t;
    }
  }
  out.value *= inv_t;
  return out;
}

LossResult dice(const Tensor& logits, std::span<const TokenId> targets, double smooth) {
  if (!(smooth > 0.0)) throw Error(ErrorKind::InvalidConfig, "dice smoothing must be > 0");
  check_targets(logits, targets);
  const Tensor probs = softmax_rows(logits);

  double overlap = 0.0;
  double pred_mass = 0.0;
  for (std::size_t t = 0; t < probs.rows(); ++t) {
    overlap += probs(t, targets[t]);
    for (double p : probs.row(t)) pred_mass += p;
  }
  const double target_mass = static_cast<double>(probs.rows());
  const double num = 2.0 * overlap + smooth;
  const double den = pred_mass + target_mass + smooth;

  // value = 1 - num/den; dvalue/dp = -(2 g / den - num / den^2)
  Tensor grad_probs(probs.rows(), probs.cols());
  const double common = num / (den * den);
  for (std::size_t t = 0; t < probs.rows(); ++t) {
    for (std::size_t v = 0; v < probs.cols(); ++v) {
      const double g = v == targets[t] ? 1.0 : 0.0;
      grad_probs(t, v) = common - 2.0 * g / den;
    }
  }
  return LossResult{1.0 - num / den, softmax_rows_backward(probs, grad_probs)};
}

LossResult composite(const CompositeSpec& spec, const std::map<std::string, LossResult>& parts) {
  spec.validate();
  LossResult out;
  bool shaped = false;
  for (const auto& [name, w] : spec.weights) {
    if (w == 0.0) continue;
    auto it = parts.find(name);
    if (it == parts.end()) {
      throw Error(ErrorKind::MissingComponent, fmt::format("no evaluated part for '{}'", name));
    }
    const LossResult& part = it->second;
    if (!shaped) {
      out.grad = Tensor(part.grad.rows(), part.grad.cols());
      shaped = true;
    } else if (!out.grad.same_shape(part.grad)) {
      throw Error(ErrorKind::InvalidShape, fmt::format("part '{}' gradient shape differs", name));
    }
    out.value += w * part.value;
    for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad.data()[i] += w * part.grad.data()[i];
  }
  return out;
}

}  // namespace otloss
