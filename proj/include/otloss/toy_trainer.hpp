// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "otloss/recipe_metrics.hpp"
#include "otloss/sinkhorn.hpp"
#include "otloss/soft_embedding.hpp"
#include "otloss/tensor.hpp"
#include "otloss/token_losses.hpp"

namespace otloss {

/// Fixed toy vocabulary: specials, dish names, ingredient names, actions.
namespace toy {

const std::vector<std::string>& vocabulary();
TokenId token(std::string_view name);  // throws InvalidToken for unknown names
const std::string& name(TokenId id);
bool is_ingredient(TokenId id);
bool is_action(TokenId id);

inline constexpr std::size_t kIngredientsPerSample = 5;
inline constexpr std::size_t kActionsPerSample = 3;
/// ingredients, <sep>, actions, <eos>
inline constexpr std::size_t kSequenceLength = kIngredientsPerSample + kActionsPerSample + 2;

}  // namespace toy

struct ToySample {
  std::vector<TokenId> prompt;  // [dish]
  std::vector<TokenId> target;  // kSequenceLength tokens
  SpanMask ingredient_span;
};

/// Templated micro-recipes. Sample i uses dish template i mod 5; the extra
/// ingredient and the ingredient order are drawn from the seeded generator.
std::vector<ToySample> synth_corpus(std::uint64_t seed, std::size_t n);

/// Embedding table plus a shared linear decoder. Position t is decoded from
/// E[dish] + E[previous token] (teacher forced during training), so logits
/// are (E[dish] + E[prev]) . decoder.
struct ToyModel {
  Tensor embeddings;  // V x d
  Tensor decoder;     // d x V
  std::size_t context = toy::kSequenceLength;

  static ToyModel init(std::size_t dim, std::uint64_t seed);
  void validate() const;
};

struct TrainConfig {
  std::size_t steps = 200;
  double learning_rate = 0.1;
  std::uint64_t seed = 7;
  CompositeSpec objective{{{"ce", 1.0}}};
  SinkhornConfig sinkhorn{};
  double focal_gamma = 2.0;
  double dice_smooth = 1e-6;
};

/// Full-batch objective values before the update of one step. Components
/// are evaluated every step whatever their weight.
struct TrajectoryRow {
  std::size_t step = 0;
  double total = 0.0;
  double ce = 0.0;
  double dice = 0.0;
  double topo = 0.0;
  double focal = 0.0;
};

struct TrainResult {
  ToyModel model;
  std::vector<TrajectoryRow> trajectory;
};

/// Teacher-forced logits (T x V) for one sample.
Tensor toy_logits(const ToyModel& model, const ToySample& sample);

/// Plain gradient descent on the mean composite loss over the corpus. The
/// topological term compares each sample's ingredient span against the
/// hard cloud of its targets, with the current embedding table held constant
/// inside that term. Throws NumericalFailure naming the step on a
/// non-finite loss.
TrainResult train(ToyModel model, const std::vector<ToySample>& corpus, const TrainConfig& cfg);

/// Greedy decoding from the dish token.
std::vector<TokenId> greedy_decode(const ToyModel& model, const ToySample& sample);

/// Toy tokens rendered as a Recipe: ingredient tokens inside the ingredient
/// span become ingredient lines, action tokens after it become steps.
Recipe tokens_to_recipe(const std::vector<TokenId>& tokens, const SpanMask& ingredient_span);

struct ToySummary {
  std::vector<double> ingredient_recall;
  std::vector<double> action_distance;
  double mean_ingredient_recall = 0.0;
  double mean_action_distance = 0.0;
};

ToySummary evaluate_toy(const ToyModel& model, const std::vector<ToySample>& corpus);

/// CSV with header "step,total,ce,dice,topo,focal"; values use %.17g.
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

}  // namespace otloss
