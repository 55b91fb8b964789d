// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/gradcheck.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "otloss/error.hpp"
#include "otloss/token_losses.hpp"
#include "rng.hpp"

namespace otloss {

GradcheckInstance make_gradcheck_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t T = 2 + detail::below(rng, 4);
  const std::size_t V = 3 + detail::below(rng, 4);
  const std::size_t d = 2 + detail::below(rng, 2);
  GradcheckInstance inst;
  inst.logits = Tensor(T, V);
  for (double& v : inst.logits.data()) v = detail::standard_normal(rng);
  for (std::size_t t = 0; t < T; ++t) inst.targets.push_back(detail::below(rng, V));
  inst.embeddings = Tensor(V, d);
  for (double& v : inst.embeddings.data()) v = detail::standard_normal(rng);
  inst.span.start = detail::below(rng, T - 1);
  inst.span.end = inst.span.start + 2 + detail::below(rng, T - inst.span.start - 1);
  return inst;
}

SinkhornConfig gradcheck_sinkhorn() { return SinkhornConfig{0.05, 1000, 1e-11}; }

namespace {

struct Check {
  const char* name;
  double h;
  double threshold;
};

constexpr Check kChecks[] = {
    {"ce", 1e-5, 1e-5},
    {"focal", 1e-5, 1e-5},
    {"dice", 1e-5, 1e-4},
    {"topo", 1e-4, 1e-3},
};

// Entries whose analytic and numeric magnitudes both fall below this are
// compared absolutely; central differences cannot resolve them relatively.
constexpr double kRelativeFloor = 1e-8;

LossResult evaluate(const std::string& which, const GradcheckInstance& inst, const Tensor& logits) {
  if (which == "ce") return cross_entropy(logits, inst.targets);
  if (which == "focal") return focal(logits, inst.targets, 2.0);
  if (which == "dice") return dice(logits, inst.targets, 1e-6);
  return topological_loss(logits, inst.targets, inst.embeddings, inst.span, inst.span,
                          gradcheck_sinkhorn());
}

}  // namespace

std::vector<GradcheckEntry> run_gradcheck(const GradcheckOptions& opts) {
  if (opts.which != "all" && !is_known_loss(opts.which)) {
    throw Error(ErrorKind::UnknownComponent, fmt::format("unknown loss '{}'", opts.which));
  }
  std::vector<GradcheckEntry> out;
  for (const auto& check : kChecks) {
    if (opts.which != "all" && opts.which != check.name) continue;
    GradcheckEntry entry{check.name, 0.0, check.threshold, opts.instances};
    for (std::size_t k = 0; k < opts.instances; ++k) {
      const auto inst = make_gradcheck_instance(opts.seed + k);
      Tensor analytic = evaluate(check.name, inst, inst.logits).grad;
      if (opts.inject_fault) {
        for (double& g : analytic.data()) g = 1.01 * g + 1e-3;
      }
      const Tensor numeric = finite_diff_grad(
          [&](const Tensor& x) { return evaluate(check.name, inst, x).value; }, inst.logits,
          check.h);
      entry.max_rel_error =
          std::max(entry.max_rel_error, max_relative_error(analytic, numeric, kRelativeFloor));
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace otloss
