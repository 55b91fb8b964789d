// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/toy_trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

#include "otloss/error.hpp"
#include "rng.hpp"

namespace otloss {
namespace toy {
namespace {

constexpr std::array<const char*, 3> kSpecials = {"<bos>", "<sep>", "<eos>"};
constexpr std::array<const char*, 5> kDishes = {"carbonara", "amatriciana", "risotto", "paella",
                                                "sandwich"};
constexpr std::array<const char*, 21> kIngredients = {
    "spaghetti", "guanciale", "egg",    "pecorino", "tomato", "rice",    "onion",
    "broth",     "parmesan",  "chicken", "shrimp",  "saffron", "bread",  "ham",
    "cheese",    "lettuce",   "salt",   "oil",      "garlic", "pepper",  "butter"};
constexpr std::array<const char*, 9> kActions = {"boil",  "fry",    "combine",  "simmer", "stir",
                                                 "toast", "serve",  "spread",   "assemble"};

struct DishTemplate {
  const char* dish;
  std::array<const char*, 4> core;
  std::array<const char*, kActionsPerSample> actions;
};

constexpr std::array<DishTemplate, 5> kTemplates = {{
    {"carbonara", {"spaghetti", "guanciale", "egg", "pecorino"}, {"boil", "fry", "combine"}},
    {"amatriciana", {"spaghetti", "guanciale", "tomato", "pecorino"}, {"boil", "fry", "simmer"}},
    {"risotto", {"rice", "onion", "broth", "parmesan"}, {"toast", "simmer", "stir"}},
    {"paella", {"rice", "chicken", "shrimp", "saffron"}, {"fry", "simmer", "serve"}},
    {"sandwich", {"bread", "ham", "cheese", "lettuce"}, {"toast", "spread", "assemble"}},
}};

constexpr std::array<const char*, 5> kOptional = {"salt", "oil", "garlic", "pepper", "butter"};

struct Tables {
  std::vector<std::string> names;
  std::map<std::string, TokenId, std::less<>> ids;
  std::size_t first_ingredient = 0;
  std::size_t first_action = 0;
};

const Tables& tables() {
  static const Tables t = [] {
    Tables out;
    auto add = [&out](const char* n) {
      out.ids.emplace(n, out.names.size());
      out.names.emplace_back(n);
    };
    for (auto n : kSpecials) add(n);
    for (auto n : kDishes) add(n);
    out.first_ingredient = out.names.size();
    for (auto n : kIngredients) add(n);
    out.first_action = out.names.size();
    for (auto n : kActions) add(n);
    return out;
  }();
  return t;
}

}  // namespace

const std::vector<std::string>& vocabulary() { return tables().names; }

TokenId token(std::string_view name) {
  const auto& ids = tables().ids;
  auto it = ids.find(name);
  if (it == ids.end()) throw Error(ErrorKind::InvalidToken, fmt::format("unknown toy token '{}'", name));
  return it->second;
}

const std::string& name(TokenId id) {
  const auto& names = tables().names;
  if (id >= names.size()) throw Error(ErrorKind::InvalidToken, fmt::format("toy id {} out of range", id));
  return names[id];
}

bool is_ingredient(TokenId id) { return id >= tables().first_ingredient && id < tables().first_action; }
bool is_action(TokenId id) { return id >= tables().first_action && id < tables().names.size(); }

}  // namespace toy

using detail::below;
using detail::standard_normal;

std::vector<ToySample> synth_corpus(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<ToySample> corpus;
  corpus.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tpl = toy::kTemplates[i % toy::kTemplates.size()];
    std::vector<TokenId> ingredients;
    for (auto c : tpl.core) ingredients.push_back(toy::token(c));
    ingredients.push_back(toy::token(toy::kOptional[below(rng, toy::kOptional.size())]));
    for (std::size_t k = ingredients.size() - 1; k > 0; --k) {
      std::swap(ingredients[k], ingredients[below(rng, k + 1)]);
    }

    ToySample s;
    s.prompt = {toy::token(tpl.dish)};
    s.target = ingredients;
    s.target.push_back(toy::token("<sep>"));
    for (auto a : tpl.actions) s.target.push_back(toy::token(a));
    s.target.push_back(toy::token("<eos>"));
    s.ingredient_span = SpanMask{0, toy::kIngredientsPerSample};
    corpus.push_back(std::move(s));
  }
  return corpus;
}

ToyModel ToyModel::init(std::size_t dim, std::uint64_t seed) {
  const std::size_t vocab = toy::vocabulary().size();
  ToyModel m;
  m.embeddings = Tensor(vocab, dim);
  m.decoder = Tensor(dim, vocab);
  std::mt19937_64 rng(seed);
  for (double& v : m.embeddings.data()) v = standard_normal(rng);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& v : m.decoder.data()) v = scale * standard_normal(rng);
  m.validate();
  return m;
}

void ToyModel::validate() const {
  const std::size_t vocab = embeddings.rows();
  const std::size_t dim = embeddings.cols();
  if (vocab == 0 || vocab > 64 || dim == 0 || dim > 16 || context == 0 || context > 32) {
    throw Error(ErrorKind::InvalidShape,
                fmt::format("toy model out of range: V={} d={} T={}", vocab, dim, context));
  }
  if (decoder.rows() != dim || decoder.cols() != vocab) {
    throw Error(ErrorKind::InvalidShape, fmt::format("decoder is {}x{}, expected {}x{}",
                                                     decoder.rows(), decoder.cols(), dim, vocab));
  }
}

namespace {

TokenId previous_token(const ToySample& s, std::size_t t) {
  return t == 0 ? toy::token("<bos>") : s.target[t - 1];
}

Tensor hidden_states(const ToyModel& model, const ToySample& sample) {
  const std::size_t T = sample.target.size();
  const std::size_t d = model.embeddings.cols();
  const TokenId dish = sample.prompt.back();
  Tensor h(T, d);
  for (std::size_t t = 0; t < T; ++t) {
    const TokenId prev = previous_token(sample, t);
    for (std::size_t k = 0; k < d; ++k) h(t, k) = model.embeddings(dish, k) + model.embeddings(prev, k);
  }
  return h;
}

void check_sample(const ToyModel& model, const ToySample& s) {
  if (s.prompt.empty() || s.target.empty() || s.target.size() > model.context) {
    throw Error(ErrorKind::InvalidShape, "toy sample shape does not fit the model context");
  }
  validate_span(s.ingredient_span, s.target.size());
}

}  // namespace

Tensor toy_logits(const ToyModel& model, const ToySample& sample) {
  return matmul(hidden_states(model, sample), model.decoder);
}

TrainResult train(ToyModel model, const std::vector<ToySample>& corpus, const TrainConfig& cfg) {
  model.validate();
  cfg.objective.validate();
  cfg.sinkhorn.validate();
  if (!(cfg.learning_rate > 0.0)) throw Error(ErrorKind::InvalidConfig, "learning rate must be > 0");
  if (corpus.empty()) throw Error(ErrorKind::InvalidConfig, "empty training corpus");
  for (const auto& s : corpus) check_sample(model, s);

  TrainResult result;
  const double inv_n = 1.0 / static_cast<double>(corpus.size());
  const std::size_t d = model.embeddings.cols();

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    TrajectoryRow row;
    row.step = step;
    Tensor grad_embeddings(model.embeddings.rows(), d);
    Tensor grad_decoder(model.decoder.rows(), model.decoder.cols());

    for (const auto& sample : corpus) try {
      const Tensor h = hidden_states(model, sample);
      const Tensor logits = matmul(h, model.decoder);
      std::map<std::string, LossResult> parts;
      parts.emplace("ce", cross_entropy(logits, sample.target));
      parts.emplace("focal", focal(logits, sample.target, cfg.focal_gamma));
      parts.emplace("dice", dice(logits, sample.target, cfg.dice_smooth));
      parts.emplace("topo", topological_loss(logits, sample.target, model.embeddings,
                                             sample.ingredient_span, sample.ingredient_span,
                                             cfg.sinkhorn));
      const LossResult mixed = composite(cfg.objective, parts);

      row.total += inv_n * mixed.value;
      row.ce += inv_n * parts.at("ce").value;
      row.focal += inv_n * parts.at("focal").value;
      row.dice += inv_n * parts.at("dice").value;
      row.topo += inv_n * parts.at("topo").value;

      // logits = h . W: dW = h^T G, dh = G W^T, h_t = E[dish] + E[prev_t].
      const Tensor dw = matmul(transpose(h), mixed.grad);
      for (std::size_t i = 0; i < dw.size(); ++i) grad_decoder.data()[i] += inv_n * dw.data()[i];
      const Tensor dh = matmul(mixed.grad, transpose(model.decoder));
      const TokenId dish = sample.prompt.back();
      for (std::size_t t = 0; t < dh.rows(); ++t) {
        const TokenId prev = previous_token(sample, t);
        for (std::size_t k = 0; k < d; ++k) {
          grad_embeddings(dish, k) += inv_n * dh(t, k);
          grad_embeddings(prev, k) += inv_n * dh(t, k);
        }
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericalFailure) throw;
      throw Error(ErrorKind::NumericalFailure, fmt::format("step {}: {}", step, e.what()));
    }

    if (!std::isfinite(row.total)) {
      throw Error(ErrorKind::NumericalFailure, fmt::format("non-finite loss at step {}", step));
    }
    result.trajectory.push_back(row);

    for (std::size_t i = 0; i < grad_decoder.size(); ++i) {
      model.decoder.data()[i] -= cfg.learning_rate * grad_decoder.data()[i];
    }
    for (std::size_t i = 0; i < grad_embeddings.size(); ++i) {
      model.embeddings.data()[i] -= cfg.learning_rate * grad_embeddings.data()[i];
    }
  }
  result.model = std::move(model);
  return result;
}

std::vector<TokenId> greedy_decode(const ToyModel& model, const ToySample& sample) {
  const std::size_t d = model.embeddings.cols();
  const TokenId dish = sample.prompt.back();
  TokenId prev = toy::token("<bos>");
  std::vector<TokenId> out;
  Tensor h(1, d);
  for (std::size_t t = 0; t < sample.target.size(); ++t) {
    for (std::size_t k = 0; k < d; ++k) h(0, k) = model.embeddings(dish, k) + model.embeddings(prev, k);
    const Tensor logits = matmul(h, model.decoder);
    auto row = logits.row(0);
    prev = static_cast<TokenId>(std::max_element(row.begin(), row.end()) - row.begin());
    out.push_back(prev);
  }
  return out;
}

Recipe tokens_to_recipe(const std::vector<TokenId>& tokens, const SpanMask& ingredient_span) {
  Recipe r;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (ingredient_span.contains(t) && toy::is_ingredient(tokens[t])) {
      r.ingredients.push_back(toy::name(tokens[t]));
    } else if (t >= ingredient_span.end && toy::is_action(tokens[t])) {
      r.instructions.push_back(toy::name(tokens[t]));
    }
  }
  return r;
}

ToySummary evaluate_toy(const ToyModel& model, const std::vector<ToySample>& corpus) {
  ToySummary out;
  for (const auto& s : corpus) {
    const Recipe gold = tokens_to_recipe(s.target, s.ingredient_span);
    const Recipe pred = tokens_to_recipe(greedy_decode(model, s), s.ingredient_span);
    out.ingredient_recall.push_back(ingredient_recall(pred, gold));
    out.action_distance.push_back(action_distance(pred, gold));
  }
  if (!corpus.empty()) {
    const double n = static_cast<double>(corpus.size());
    for (double v : out.ingredient_recall) out.mean_ingredient_recall += v / n;
    for (double v : out.action_distance) out.mean_action_distance += v / n;
  }
  return out;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "step,total,ce,dice,topo,focal\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.step, r.total, r.ce, r.dice,
                       r.topo, r.focal);
  }
  return out;
}

}  // namespace otloss
