// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "otloss/error.hpp"

namespace otloss::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidConfig, fmt::format("cannot write '{}'", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError,
                fmt::format("{}: malformed JSON at line {}, column {}", source, line, col));
  }
}

Json load_json(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

Tensor tensor_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data")) {
    throw Error(ErrorKind::SchemaError, "tensor needs \"shape\" and \"data\"");
  }
  const Json& shape = j.at("shape");
  const Json& data = j.at("data");
  if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_unsigned() ||
      !shape[1].is_number_unsigned()) {
    throw Error(ErrorKind::SchemaError, "tensor shape must be [rows, cols]");
  }
  if (!data.is_array()) throw Error(ErrorKind::SchemaError, "tensor data must be an array");
  const auto rows = shape[0].get<std::size_t>();
  const auto cols = shape[1].get<std::size_t>();
  if (data.size() != rows * cols) {
    throw Error(ErrorKind::InvalidShape, fmt::format("tensor shape [{}, {}] expects {} values, got {}",
                                                     rows, cols, rows * cols, data.size()));
  }
  std::vector<double> values;
  values.reserve(data.size());
  for (const auto& v : data) {
    if (!v.is_number()) throw Error(ErrorKind::SchemaError, "tensor data must be numeric");
    values.push_back(v.get<double>());
  }
  return Tensor(rows, cols, std::move(values));
}

Json tensor_to_json(const Tensor& t) {
  Json j;
  j["shape"] = {t.rows(), t.cols()};
  j["data"] = t.data();
  return j;
}

Tensor load_tensor(const std::filesystem::path& path) { return tensor_from_json(load_json(path)); }

std::vector<TokenId> token_ids_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::SchemaError, "targets must be an array of token ids");
  std::vector<TokenId> ids;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) {
      throw Error(ErrorKind::SchemaError, "targets must be non-negative integers");
    }
    ids.push_back(v.get<TokenId>());
  }
  return ids;
}

SpanMask parse_span(std::string_view text) {
  const auto colon = text.find(':');
  SpanMask span;
  auto parse = [&](std::string_view s, std::size_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
  };
  if (colon == std::string_view::npos || !parse(text.substr(0, colon), span.start) ||
      !parse(text.substr(colon + 1), span.end)) {
    throw Error(ErrorKind::ParseError, fmt::format("span '{}' is not start:end", text));
  }
  return span;
}

namespace {

std::vector<std::string> string_list(const Json& j, const char* key, std::string_view id) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw Error(ErrorKind::SchemaError, fmt::format("record '{}': \"{}\" must be a list", id, key));
  }
  std::vector<std::string> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_string()) {
      throw Error(ErrorKind::SchemaError,
                  fmt::format("record '{}': \"{}\" entries must be strings", id, key));
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Recipe recipe_from_json(const Json& j, std::string_view id) {
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, fmt::format("record '{}': recipe must be an object", id));
  Recipe r{string_list(j, "ingredients", id), string_list(j, "instructions", id)};
  if (auto err = r.validation_error(); !err.empty()) {
    throw Error(ErrorKind::SchemaError, fmt::format("record '{}': {}", id, err));
  }
  return r;
}

Json recipe_to_json(const Recipe& r) {
  Json j;
  j["ingredients"] = r.ingredients;
  j["instructions"] = r.instructions;
  return j;
}

std::vector<RecipePair> recipe_pairs_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::SchemaError, "pairs file must be a JSON array");
  std::vector<RecipePair> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& rec = j[i];
    std::string id = fmt::format("#{}", i);
    if (rec.is_object() && rec.contains("id") && rec.at("id").is_string()) {
      id = rec.at("id").get<std::string>();
    } else {
      throw Error(ErrorKind::SchemaError, fmt::format("record '{}': missing string \"id\"", id));
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::SchemaError, fmt::format("record '{}': duplicate id", id));
    }
    for (const char* key : {"pred", "gold"}) {
      if (!rec.contains(key)) {
        throw Error(ErrorKind::SchemaError, fmt::format("record '{}': missing \"{}\"", id, key));
      }
    }
    out.push_back({id, recipe_from_json(rec.at("pred"), id), recipe_from_json(rec.at("gold"), id)});
  }
  return out;
}

CompositeSpec composite_spec_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "loss spec must be an object");
  CompositeSpec spec;
  for (const auto& [name, w] : j.items()) {
    if (!is_known_loss(name)) {
      throw Error(ErrorKind::UnknownComponent, fmt::format("unknown loss '{}'", name));
    }
    if (!w.is_number()) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("weight of '{}' must be a number", name));
    }
    spec.weights[name] = w.get<double>();
  }
  spec.validate();
  return spec;
}

namespace {

double number(const Json& v, std::string_view key) {
  if (!v.is_number()) throw Error(ErrorKind::InvalidConfig, fmt::format("'{}' must be a number", key));
  return v.get<double>();
}

std::uint64_t count(const Json& v, std::string_view key) {
  if (!v.is_number_unsigned()) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("'{}' must be a non-negative integer", key));
  }
  return v.get<std::uint64_t>();
}

}  // namespace

ToyRunConfig toy_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  ToyRunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "steps") c.train.steps = count(v, key);
    else if (key == "learning_rate") c.train.learning_rate = number(v, key);
    else if (key == "seed") c.train.seed = count(v, key);
    else if (key == "samples") c.samples = count(v, key);
    else if (key == "dim") c.dim = count(v, key);
    else if (key == "objective") c.train.objective = composite_spec_from_json(v);
    else if (key == "epsilon") c.train.sinkhorn.epsilon = number(v, key);
    else if (key == "max_iters") c.train.sinkhorn.max_iters = count(v, key);
    else if (key == "tolerance") c.train.sinkhorn.tolerance = number(v, key);
    else if (key == "focal_gamma") c.train.focal_gamma = number(v, key);
    else if (key == "dice_smooth") c.train.dice_smooth = number(v, key);
    else throw Error(ErrorKind::InvalidConfig, fmt::format("unknown config key '{}'", key));
  }
  if (c.samples == 0) throw Error(ErrorKind::InvalidConfig, "samples must be >= 1");
  if (!(c.train.learning_rate > 0.0)) throw Error(ErrorKind::InvalidConfig, "learning_rate must be > 0");
  if (c.train.focal_gamma < 0.0) throw Error(ErrorKind::InvalidConfig, "focal_gamma must be >= 0");
  if (!(c.train.dice_smooth > 0.0)) throw Error(ErrorKind::InvalidConfig, "dice_smooth must be > 0");
  c.train.sinkhorn.validate();
  return c;
}

Json model_to_json(const ToyModel& m) {
  Json j;
  j["embeddings"] = tensor_to_json(m.embeddings);
  j["decoder"] = tensor_to_json(m.decoder);
  return j;
}

namespace {

std::string csv_cell(const std::optional<double>& v) {
  return v ? fmt::format("{:.17g}", *v) : std::string();
}

std::string csv_row(std::string_view id, const MetricReport& r) {
  std::string line(id);
  for (auto m : kAllMetrics) line += "," + csv_cell(r[m]);
  for (auto m : kAllMetrics) line += fmt::format(",{}", r.count(m));
  return line + "\n";
}

Json json_row(std::string_view id, const MetricReport& r) {
  Json row;
  row["id"] = id;
  for (auto m : kAllMetrics) {
    const auto& v = r[m];
    row[std::string(metric_name(m))] = v ? Json(*v) : Json(nullptr);
  }
  Json counts;
  for (auto m : kAllMetrics) counts[std::string(metric_name(m))] = r.count(m);
  row["counts"] = counts;
  return row;
}

}  // namespace

std::string report_csv(const std::vector<std::string>& ids, const std::vector<MetricReport>& rows,
                       const MetricReport& aggregate) {
  std::string out = "id";
  for (auto m : kAllMetrics) out += fmt::format(",{}", metric_name(m));
  for (auto m : kAllMetrics) out += fmt::format(",n_{}", metric_name(m));
  out += "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) out += csv_row(ids.at(i), rows[i]);
  out += csv_row("aggregate", aggregate);
  return out;
}

std::string report_json(const std::vector<std::string>& ids, const std::vector<MetricReport>& rows,
                        const MetricReport& aggregate) {
  Json j;
  j["pairs"] = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) j["pairs"].push_back(json_row(ids.at(i), rows[i]));
  Json agg = json_row("aggregate", aggregate);
  agg["n_pairs"] = aggregate.pairs;
  j["aggregate"] = agg;
  return j.dump(2) + "\n";
}

}  // namespace otloss::io
