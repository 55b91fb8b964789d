// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/recipe_metrics.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "otloss/error.hpp"

namespace otloss {
namespace {

// Comparisons at exactly the threshold count as correct; the slack absorbs
// the rounding of the ratio itself.
constexpr double kRelSlack = 1e-12;

struct StepFeatures {
  std::string normalized;
  std::vector<std::string> actions;  // in order
  std::vector<double> seconds;
  std::vector<double> celsius;
};

struct RecipeFeatures {
  std::vector<IngredientEntry> ingredients;
  std::vector<StepFeatures> steps;
  std::vector<std::string> actions;
  std::vector<double> seconds;
  std::vector<double> celsius;
};

StepFeatures step_features(std::string_view step, std::size_t index, const ActionLexicon& lex) {
  StepFeatures f;
  f.normalized = normalize_text(step);
  for (auto& a : extract_actions(step, lex, index)) f.actions.push_back(std::move(a.verb));
  for (const auto& t : extract_times(step)) f.seconds.push_back(t.seconds);
  for (const auto& t : extract_temperatures(step)) f.celsius.push_back(t.celsius);
  return f;
}

RecipeFeatures features(const Recipe& r, const MetricOptions& opts) {
  RecipeFeatures f;
  for (const auto& line : r.ingredients) {
    try {
      f.ingredients.push_back(parse_ingredient(line));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnparsableIngredient) throw;
    }
  }
  for (std::size_t i = 0; i < r.instructions.size(); ++i) {
    StepFeatures s = step_features(r.instructions[i], i, opts.actions());
    f.actions.insert(f.actions.end(), s.actions.begin(), s.actions.end());
    f.seconds.insert(f.seconds.end(), s.seconds.begin(), s.seconds.end());
    f.celsius.insert(f.celsius.end(), s.celsius.begin(), s.celsius.end());
    f.steps.push_back(std::move(s));
  }
  return f;
}

struct Score {
  std::optional<double> value;
  std::size_t denominator = 0;
};

double unwrap(const Score& s, const char* metric) {
  if (!s.value) {
    throw Error(ErrorKind::UndefinedMetric, fmt::format("{} has a zero denominator", metric));
  }
  return *s.value;
}

bool contains_phrase(const std::string& outer, const std::string& inner) {
  return (" " + outer + " ").find(" " + inner + " ") != std::string::npos;
}

bool heads_match(const std::string& a, const std::string& b) {
  return a == b || contains_phrase(a, b) || contains_phrase(b, a);
}

// Greedy in gold order: an exact head match is preferred, then phrase
// containment. Returns (gold index, pred index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> match_ingredients(const RecipeFeatures& pred,
                                                                   const RecipeFeatures& gold) {
  std::vector<bool> used(pred.ingredients.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (std::size_t g = 0; g < gold.ingredients.size(); ++g) {
    const std::string& head = gold.ingredients[g].head;
    std::optional<std::size_t> pick;
    for (std::size_t p = 0; p < pred.ingredients.size() && !pick; ++p) {
      if (!used[p] && pred.ingredients[p].head == head) pick = p;
    }
    for (std::size_t p = 0; p < pred.ingredients.size() && !pick; ++p) {
      if (!used[p] && heads_match(pred.ingredients[p].head, head)) pick = p;
    }
    if (pick) {
      used[*pick] = true;
      matches.emplace_back(g, *pick);
    }
  }
  return matches;
}

bool quantity_close(const QuantityMention& pred, const QuantityMention& gold, double tol) {
  return pred.unit == gold.unit && std::abs(pred.value - gold.value) / gold.value <= tol + kRelSlack;
}

bool time_close(double pred, double gold, double tol) {
  return std::abs(pred - gold) / gold <= tol + kRelSlack;
}

bool temperature_close(double pred, double gold, double tol) {
  return std::abs(pred - gold) <= tol + 1e-9;
}

template <typename Close>
Score mention_precision(const std::vector<double>& pred, const std::vector<double>& gold,
                        Close close) {
  if (gold.empty()) return {};
  std::vector<bool> used(pred.size(), false);
  std::size_t correct = 0;
  for (double g : gold) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (!used[p] && close(pred[p], g)) {
        used[p] = true;
        ++correct;
        break;
      }
    }
  }
  return {100.0 * static_cast<double>(correct) / static_cast<double>(gold.size()), gold.size()};
}

Score recall_score(const RecipeFeatures& pred, const RecipeFeatures& gold) {
  if (gold.ingredients.empty()) return {};
  const auto matches = match_ingredients(pred, gold);
  return {100.0 * static_cast<double>(matches.size()) / static_cast<double>(gold.ingredients.size()),
          gold.ingredients.size()};
}

Score quantity_score(const RecipeFeatures& pred, const RecipeFeatures& gold,
                     const MetricThresholds& th) {
  std::size_t considered = 0;
  std::size_t correct = 0;
  for (const auto& [g, p] : match_ingredients(pred, gold)) {
    const auto& gq = gold.ingredients[g].quantity;
    if (!gq) continue;
    ++considered;
    const auto& pq = pred.ingredients[p].quantity;
    if (pq && quantity_close(*pq, *gq, th.quantity_rel_tol)) ++correct;
  }
  if (considered == 0) return {};
  return {100.0 * static_cast<double>(correct) / static_cast<double>(considered), considered};
}

Score action_precision_score(const RecipeFeatures& pred, const RecipeFeatures& gold) {
  if (pred.actions.empty()) return {};
  std::map<std::string, std::size_t> gold_counts;
  for (const auto& a : gold.actions) ++gold_counts[a];
  std::size_t hit = 0;
  for (const auto& a : pred.actions) {
    auto it = gold_counts.find(a);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++hit;
    }
  }
  return {100.0 * static_cast<double>(hit) / static_cast<double>(pred.actions.size()),
          pred.actions.size()};
}

template <typename T, typename Eq>
Score normalized_distance(const std::vector<T>& pred, const std::vector<T>& gold, Eq eq) {
  if (gold.empty()) return {};
  const std::size_t longest = std::max(pred.size(), gold.size());
  const std::size_t d = levenshtein<T>(std::span<const T>(pred), std::span<const T>(gold), eq);
  return {100.0 * static_cast<double>(d) / static_cast<double>(longest), longest};
}

bool step_features_equivalent(const StepFeatures& a, const StepFeatures& b,
                              const MetricThresholds& th) {
  if (a.normalized == b.normalized) return true;
  if (a.actions.empty()) return false;
  auto sa = a.actions, sb = b.actions;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  if (a.seconds.size() != b.seconds.size() || a.celsius.size() != b.celsius.size()) return false;
  for (std::size_t i = 0; i < a.seconds.size(); ++i) {
    if (!time_close(a.seconds[i], b.seconds[i], th.time_rel_tol)) return false;
  }
  for (std::size_t i = 0; i < a.celsius.size(); ++i) {
    if (!temperature_close(a.celsius[i], b.celsius[i], th.temperature_abs_tol)) return false;
  }
  return true;
}

std::vector<std::string> tokens_of(const Recipe& r) {
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    const std::string norm = normalize_text(s);
    std::size_t i = 0;
    while (i < norm.size()) {
      const std::size_t j = norm.find(' ', i);
      const std::size_t stop = j == std::string::npos ? norm.size() : j;
      if (stop > i) out.push_back(norm.substr(i, stop - i));
      i = stop + 1;
    }
  };
  for (const auto& s : r.ingredients) add(s);
  for (const auto& s : r.instructions) add(s);
  return out;
}

Score rouge_score(const Recipe& pred, const Recipe& gold) {
  const auto gold_tokens = tokens_of(gold);
  if (gold_tokens.empty()) return {};
  const auto pred_tokens = tokens_of(pred);
  std::map<std::string, std::size_t> gold_counts;
  for (const auto& t : gold_tokens) ++gold_counts[t];
  std::size_t overlap = 0;
  for (const auto& t : pred_tokens) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return {0.0, gold_tokens.size()};
  const double p = static_cast<double>(overlap) / static_cast<double>(pred_tokens.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(gold_tokens.size());
  return {100.0 * 2.0 * p * r / (p + r), gold_tokens.size()};
}

}  // namespace

std::string Recipe::validation_error() const {
  auto blank = [](const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
  };
  if (ingredients.empty()) return "ingredients list is empty";
  if (instructions.empty()) return "instructions list is empty";
  for (std::size_t i = 0; i < ingredients.size(); ++i) {
    if (blank(ingredients[i])) return fmt::format("ingredient {} is blank", i);
  }
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    if (blank(instructions[i])) return fmt::format("instruction {} is blank", i);
  }
  return {};
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::R1: return "r1";
    case Metric::AP: return "ap";
    case Metric::QP: return "qp";
    case Metric::IR: return "ir";
    case Metric::TeP: return "tep";
    case Metric::TiP: return "tip";
    case Metric::AD: return "ad";
    case Metric::SD: return "sd";
  }
  return "?";
}

double ingredient_recall(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  return unwrap(recall_score(features(pred, opts), features(gold, opts)), "ingredient recall");
}

double quantity_precision(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  return unwrap(quantity_score(features(pred, opts), features(gold, opts), opts.thresholds),
                "quantity precision");
}

double action_precision(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  return unwrap(action_precision_score(features(pred, opts), features(gold, opts)),
                "action precision");
}

double time_precision(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  const double tol = opts.thresholds.time_rel_tol;
  return unwrap(mention_precision(features(pred, opts).seconds, features(gold, opts).seconds,
                                  [tol](double p, double g) { return time_close(p, g, tol); }),
                "time precision");
}

double temperature_precision(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  const double tol = opts.thresholds.temperature_abs_tol;
  return unwrap(
      mention_precision(features(pred, opts).celsius, features(gold, opts).celsius,
                        [tol](double p, double g) { return temperature_close(p, g, tol); }),
      "temperature precision");
}

double action_distance(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  return unwrap(normalized_distance(features(pred, opts).actions, features(gold, opts).actions,
                                    std::equal_to<>{}),
                "action distance");
}

double step_distance(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  const auto th = opts.thresholds;
  return unwrap(normalized_distance(features(pred, opts).steps, features(gold, opts).steps,
                                    [&th](const StepFeatures& a, const StepFeatures& b) {
                                      return step_features_equivalent(a, b, th);
                                    }),
                "step distance");
}

double rouge1(const Recipe& pred, const Recipe& gold) {
  return unwrap(rouge_score(pred, gold), "rouge-1");
}

std::vector<std::string> rouge_tokens(const Recipe& recipe) { return tokens_of(recipe); }

bool steps_equivalent(std::string_view a, std::string_view b, const MetricOptions& opts) {
  return step_features_equivalent(step_features(a, 0, opts.actions()),
                                  step_features(b, 0, opts.actions()), opts.thresholds);
}

MetricReport score_pair(const Recipe& pred, const Recipe& gold, const MetricOptions& opts) {
  const RecipeFeatures p = features(pred, opts);
  const RecipeFeatures g = features(gold, opts);
  const MetricThresholds& th = opts.thresholds;

  MetricReport report;
  auto put = [&report](Metric m, const Score& s) {
    report.scores[static_cast<std::size_t>(m)] = s.value;
    report.counts[static_cast<std::size_t>(m)] = s.denominator;
  };
  put(Metric::R1, rouge_score(pred, gold));
  put(Metric::AP, action_precision_score(p, g));
  put(Metric::QP, quantity_score(p, g, th));
  put(Metric::IR, recall_score(p, g));
  put(Metric::TeP, mention_precision(p.celsius, g.celsius, [&th](double a, double b) {
        return temperature_close(a, b, th.temperature_abs_tol);
      }));
  put(Metric::TiP, mention_precision(p.seconds, g.seconds, [&th](double a, double b) {
        return time_close(a, b, th.time_rel_tol);
      }));
  put(Metric::AD, normalized_distance(p.actions, g.actions, std::equal_to<>{}));
  put(Metric::SD, normalized_distance(p.steps, g.steps, [&th](const StepFeatures& a, const StepFeatures& b) {
        return step_features_equivalent(a, b, th);
      }));
  return report;
}

MetricReport aggregate(std::span<const MetricReport> reports) {
  MetricReport out;
  out.pairs = reports.size();
  bool any = false;
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : reports) {
      if (r.scores[m]) {
        sum += *r.scores[m];
        ++n;
      }
    }
    out.counts[m] = n;
    if (n > 0) {
      out.scores[m] = sum / static_cast<double>(n);
      any = true;
    }
  }
  if (!any) throw Error(ErrorKind::EmptyReport, "no metric is defined for any pair");
  return out;
}

MetricReport score_corpus(std::span<const std::pair<Recipe, Recipe>> pairs,
                          const MetricOptions& opts) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyReport, "corpus has no pairs");
  std::vector<MetricReport> reports;
  reports.reserve(pairs.size());
  for (const auto& [pred, gold] : pairs) reports.push_back(score_pair(pred, gold, opts));
  return aggregate(reports);
}

}  // namespace otloss
