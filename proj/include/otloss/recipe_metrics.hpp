// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otloss/extraction.hpp"

namespace otloss {

struct Recipe {
  std::vector<std::string> ingredients;
  std::vector<std::string> instructions;

  /// Empty string when the recipe is valid (both lists non-empty, no blank
  /// entries); otherwise a description of the first violation.
  std::string validation_error() const;
};

enum class Metric : std::size_t { R1, AP, QP, IR, TeP, TiP, AD, SD };

inline constexpr std::size_t kMetricCount = 8;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::R1, Metric::AP, Metric::QP, Metric::IR, Metric::TeP, Metric::TiP, Metric::AD, Metric::SD};

/// Column/key name: r1, ap, qp, ir, tep, tip, ad, sd.
std::string_view metric_name(Metric m);

struct MetricThresholds {
  double quantity_rel_tol = 0.01;
  double time_rel_tol = 0.10;
  double temperature_abs_tol = 10.0;
};

struct MetricOptions {
  MetricThresholds thresholds{};
  const ActionLexicon* lexicon = nullptr;  // null selects ActionLexicon::builtin()

  const ActionLexicon& actions() const { return lexicon ? *lexicon : ActionLexicon::builtin(); }
};

/// Scores on the 0-100 scale. Undefined scores (zero denominator) are empty.
///
/// For a single pair, counts hold each metric's denominator. For a corpus
/// aggregate, counts hold the number of pairs where the metric was defined
/// and `pairs` the corpus size.
struct MetricReport {
  std::array<std::optional<double>, kMetricCount> scores{};
  std::array<std::size_t, kMetricCount> counts{};
  std::size_t pairs = 1;

  const std::optional<double>& operator[](Metric m) const {
    return scores[static_cast<std::size_t>(m)];
  }
  std::size_t count(Metric m) const { return counts[static_cast<std::size_t>(m)]; }
};

/// Unit-cost edit distance (insert, delete, substitute) with a two-row DP.
template <typename T, typename Eq = std::equal_to<>>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b, Eq eq = {}) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (eq(a[i - 1], b[j - 1]) ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <typename T>
std::size_t levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  return levenshtein<T>(std::span<const T>(a), std::span<const T>(b));
}

/// Every function below throws UndefinedMetric when its denominator is zero.
double ingredient_recall(const Recipe& pred, const Recipe& gold, const MetricOptions& opts = {});
double quantity_precision(const Recipe& pred, const Recipe& gold, const MetricOptions& opts = {});
double action_precision(const Recipe& pred, const Recipe& gold, const MetricOptions& opts = {});
double time_precision(const Recipe& pred, const Recipe& gold, const MetricOptions& opts = {});
double temperature_precision(const Recipe& pred, const Recipe& gold,
                             const MetricOptions& opts = {});
double action_distance(const Recipe& pred, const Recipe& gold, const MetricOptions& opts = {});
double step_distance(const Recipe& pred, const Recipe& gold, const MetricOptions& opts = {});
double rouge1(const Recipe& pred, const Recipe& gold);

/// Whitespace tokens of the normalized ingredients + instructions text.
std::vector<std::string> rouge_tokens(const Recipe& recipe);

/// Steps are equal when their normalized text matches, or when they share a
/// non-empty action multiset and every time/temperature mention agrees
/// pairwise within the thresholds.
bool steps_equivalent(std::string_view a, std::string_view b, const MetricOptions& opts = {});

MetricReport score_pair(const Recipe& pred, const Recipe& gold, const MetricOptions& opts = {});

/// Per-metric mean over the reports where the metric is defined, in input
/// order. Throws EmptyReport when no metric is defined anywhere.
MetricReport aggregate(std::span<const MetricReport> reports);

MetricReport score_corpus(std::span<const std::pair<Recipe, Recipe>> pairs,
                          const MetricOptions& opts = {});

}  // namespace otloss
