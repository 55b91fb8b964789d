// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "otloss/recipe_metrics.hpp"
#include "otloss/tensor.hpp"
#include "otloss/token_losses.hpp"
#include "otloss/toy_trainer.hpp"

namespace otloss::io {

using Json = nlohmann::ordered_json;

/// Whole file as bytes. Throws ParseError when unreadable.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Parses JSON text; syntax errors become ParseError with "line L, column C".
/// `source` names the input in the message.
Json parse_json(std::string_view text, std::string_view source);
Json load_json(const std::filesystem::path& path);

/// {"shape": [rows, cols], "data": [...]}. Length mismatch or non-numeric
/// entries throw InvalidShape / SchemaError.
Tensor tensor_from_json(const Json& j);
Json tensor_to_json(const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

/// JSON array of non-negative integers.
std::vector<TokenId> token_ids_from_json(const Json& j);

/// Inline "start:end".
SpanMask parse_span(std::string_view text);

Recipe recipe_from_json(const Json& j, std::string_view id);
Json recipe_to_json(const Recipe& r);

struct RecipePair {
  std::string id;
  Recipe pred;
  Recipe gold;
};

/// Array of {"id", "pred", "gold"}. Schema violations (missing fields, bad
/// types, invalid recipes, duplicate ids) throw SchemaError naming the id.
std::vector<RecipePair> recipe_pairs_from_json(const Json& j);

/// {"ce": 0.6, ...}; validated.
CompositeSpec composite_spec_from_json(const Json& j);

/// Keys: steps, learning_rate, seed, samples, dim, objective, epsilon,
/// max_iters, tolerance, focal_gamma, dice_smooth. Unknown keys and bad
/// values throw InvalidConfig; unknown loss names throw UnknownComponent.
struct ToyRunConfig {
  TrainConfig train;
  std::size_t samples = 8;
  std::size_t dim = 8;
};
ToyRunConfig toy_config_from_json(const Json& j);

Json model_to_json(const ToyModel& m);

/// Fixed columns: id, r1, ap, qp, ir, tep, tip, ad, sd, then n_<metric>
/// counts. Undefined scores are empty (CSV) or null (JSON). The final row
/// has id "aggregate".
std::string report_csv(const std::vector<std::string>& ids, const std::vector<MetricReport>& rows,
                       const MetricReport& aggregate);
std::string report_json(const std::vector<std::string>& ids, const std::vector<MetricReport>& rows,
                        const MetricReport& aggregate);

}  // namespace otloss::io
