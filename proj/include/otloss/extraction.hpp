// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace otloss {

enum class Unit { Gram, Millilitre, Piece };

std::string_view to_string(Unit unit);

struct QuantityMention {
  double value = 0.0;
  Unit unit = Unit::Piece;
  std::string raw;
};

struct TimeMention {
  double seconds = 0.0;
  std::string raw;
};

inline constexpr double kMinPlausibleCelsius = -50.0;
inline constexpr double kMaxPlausibleCelsius = 400.0;

struct TemperatureMention {
  double celsius = 0.0;
  std::string raw;
  bool plausible = true;  // within [kMinPlausibleCelsius, kMaxPlausibleCelsius]
};

struct ActionMention {
  std::string verb;       // canonical lexicon spelling
  std::size_t position;   // index of the instruction step
};

struct IngredientEntry {
  std::string head;
  std::optional<QuantityMention> quantity;
  std::string raw;
};

/// Cooking verbs with their inflected forms (-s, -es, -ed, -ing, doubled
/// final consonant, -ies/-ied), matched after lowercasing and accent folding.
class ActionLexicon {
 public:
  /// The shipped lexicon (same content as data/actions.txt).
  static const ActionLexicon& builtin();

  /// One verb per line; blank lines and text after '#' are ignored. Throws
  /// InvalidConfig when no verb remains.
  static ActionLexicon from_text(std::string_view text);
  static ActionLexicon from_file(const std::filesystem::path& path);

  /// Canonical verb for a folded word form, if any.
  std::optional<std::string> match(std::string_view folded_word) const;

  const std::vector<std::string>& verbs() const noexcept { return verbs_; }

 private:
  std::vector<std::string> verbs_;
  std::unordered_map<std::string, std::size_t> forms_;
};

/// Text of the built-in lexicon file.
std::string_view builtin_lexicon_text();

/// Lowercase with Latin-1 accents folded to their base letters
/// ("Sauté" -> "saute"). Other bytes pass through unchanged.
std::string fold_text(std::string_view text);

/// Lowercased, accent-folded, ASCII punctuation replaced by spaces and
/// whitespace collapsed. Used for step equality and ROUGE tokens.
std::string normalize_text(std::string_view text);

/// Ingredient head normalization: text after the first comma and inside
/// parentheses dropped, lowercased, non-letters removed, descriptor words
/// ("large", "grated", ...) dropped, last word singularized. Idempotent.
std::string normalize_head(std::string_view text);

/// Singular form of one lowercase word by suffix rules and a small
/// exception table.
std::string singularize(std::string_view word);

/// Throws UnparsableIngredient when the line has no alphabetic content.
IngredientEntry parse_ingredient(std::string_view line);

std::vector<TimeMention> extract_times(std::string_view step);
std::vector<TemperatureMention> extract_temperatures(std::string_view step);
std::vector<ActionMention> extract_actions(std::string_view step, const ActionLexicon& lexicon,
                                           std::size_t step_index = 0);

}  // namespace otloss
