// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/extraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "otloss/error.hpp"

namespace otloss {
namespace {

constexpr char kBuiltinLexicon[] = R"(# Cooking action lexicon: one verb per line, '#' starts a comment.
boil
fry
sauté
bake
mix
combine
stir
simmer
drain
serve
remove
garnish
chop
slice
whisk
season
preheat
toast
grill
roast
melt
pour
add
cook
heat
cover
rest
knead
spread
layer
assemble
toss
blend
fold
mash
peel
rinse
soak
marinate
sear
)";

// ---------------------------------------------------------------------------
// UTF-8 text as code points with byte offsets back into the source.

struct CodePoints {
  std::string_view src;
  std::vector<char32_t> cp;
  std::vector<std::size_t> off;  // off[i] = byte offset of cp[i]; off[size] = src.size()

  explicit CodePoints(std::string_view s) : src(s) {
    std::size_t i = 0;
    while (i < s.size()) {
      const auto b0 = static_cast<unsigned char>(s[i]);
      char32_t c = 0xFFFD;
      std::size_t len = 1;
      if (b0 < 0x80) {
        c = b0;
      } else if ((b0 >> 5) == 0x6) {
        len = 2;
      } else if ((b0 >> 4) == 0xE) {
        len = 3;
      } else if ((b0 >> 3) == 0x1E) {
        len = 4;
      }
      if (len > 1) {
        if (i + len > s.size()) {
          len = 1;
        } else {
          c = b0 & (0xFF >> (len + 1));
          for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b >> 6) != 0x2) {
              c = 0xFFFD;
              len = 1;
              break;
            }
            c = (c << 6) | (b & 0x3F);
          }
        }
      }
      cp.push_back(c);
      off.push_back(i);
      i += len;
    }
    off.push_back(s.size());
  }

  std::size_t size() const noexcept { return cp.size(); }
  char32_t at(std::size_t i) const noexcept { return i < cp.size() ? cp[i] : U'\0'; }
  std::string_view bytes(std::size_t from, std::size_t to) const {
    return src.substr(off[from], off[to] - off[from]);
  }
};

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_letter(char32_t c) {
  if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return true;
  if (c >= 0xC0 && c <= 0xFF) return c != 0xD7 && c != 0xF7;
  return c >= 0x100 && c <= 0x17F;
}

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == 0xA0; }

std::optional<double> unicode_fraction(char32_t c) {
  switch (c) {
    case 0xBC: return 0.25;
    case 0xBD: return 0.5;
    case 0xBE: return 0.75;
    case 0x2150: return 1.0 / 7.0;
    case 0x2151: return 1.0 / 9.0;
    case 0x2152: return 0.1;
    case 0x2153: return 1.0 / 3.0;
    case 0x2154: return 2.0 / 3.0;
    case 0x2155: return 0.2;
    case 0x2156: return 0.4;
    case 0x2157: return 0.6;
    case 0x2158: return 0.8;
    case 0x2159: return 1.0 / 6.0;
    case 0x215A: return 5.0 / 6.0;
    case 0x215B: return 0.125;
    case 0x215C: return 0.375;
    case 0x215D: return 0.625;
    case 0x215E: return 0.875;
    default: return std::nullopt;
  }
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

// Lowercase base spelling of one code point.
void append_folded(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c >= U'A' && c <= U'Z' ? c + 32 : c));
    return;
  }
  if (c >= 0xC0 && c <= 0xFF && c != 0xD7 && c != 0xF7) {
    // Latin-1 letters, uppercase block folded onto lowercase.
    static constexpr std::array<const char*, 32> kLower = {
        "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
        "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "ss"};
    const char32_t idx = c >= 0xE0 ? c - 0xE0 : c - 0xC0;
    if (c == 0xFF) {
      out += "y";
    } else if (c == 0xDF) {
      out += "ss";
    } else {
      out += kLower[idx];
    }
    return;
  }
  append_utf8(out, c);
}

// ---------------------------------------------------------------------------
// Number scanning.

struct NumberSpan {
  double value = 0.0;
  std::size_t end = 0;  // one past the last code point
};

bool number_boundary(const CodePoints& t, std::size_t i) {
  if (i == 0) return true;
  const char32_t p = t.cp[i - 1];
  return !(is_letter(p) || is_digit(p) || p == U'.' || p == U'/' || unicode_fraction(p));
}

std::optional<NumberSpan> parse_decimal(const CodePoints& t, std::size_t i, bool* integral) {
  if (!is_digit(t.at(i))) return std::nullopt;
  std::size_t j = i;
  while (is_digit(t.at(j))) ++j;
  *integral = true;
  if (t.at(j) == U'.' && is_digit(t.at(j + 1))) {
    *integral = false;
    ++j;
    while (is_digit(t.at(j))) ++j;
  }
  const std::string_view digits = t.bytes(i, j);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc{}) return std::nullopt;
  return NumberSpan{v, j};
}

// "3", "2.5", "1/2", "1 1/2", "1½", "1 ½", "½".
std::optional<NumberSpan> parse_simple_number(const CodePoints& t, std::size_t i) {
  if (auto f = unicode_fraction(t.at(i))) return NumberSpan{*f, i + 1};
  bool integral = false;
  auto whole = parse_decimal(t, i, &integral);
  if (!whole) return std::nullopt;
  std::size_t j = whole->end;
  if (integral && t.at(j) == U'/' && is_digit(t.at(j + 1))) {
    bool den_integral = false;
    auto den = parse_decimal(t, j + 1, &den_integral);
    if (den && den_integral && den->value > 0.0) return NumberSpan{whole->value / den->value, den->end};
    return whole;
  }
  if (!integral) return whole;
  if (auto f = unicode_fraction(t.at(j))) return NumberSpan{whole->value + *f, j + 1};
  if (t.at(j) == U' ') {
    if (auto f = unicode_fraction(t.at(j + 1))) return NumberSpan{whole->value + *f, j + 2};
    bool num_integral = false;
    auto num = parse_decimal(t, j + 1, &num_integral);
    if (num && num_integral && t.at(num->end) == U'/' && is_digit(t.at(num->end + 1))) {
      bool den_integral = false;
      auto den = parse_decimal(t, num->end + 1, &den_integral);
      if (den && den_integral && den->value > 0.0) {
        return NumberSpan{whole->value + num->value / den->value, den->end};
      }
    }
  }
  return whole;
}

std::size_t skip_spaces(const CodePoints& t, std::size_t i) {
  while (i < t.size() && is_space(t.cp[i])) ++i;
  return i;
}

struct Word {
  std::string folded;
  std::string raw;
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::optional<Word> word_at(const CodePoints& t, std::size_t i) {
  if (!is_letter(t.at(i))) return std::nullopt;
  Word w;
  w.begin = i;
  std::size_t j = i;
  while (is_letter(t.at(j))) {
    append_folded(w.folded, t.cp[j]);
    ++j;
  }
  w.end = j;
  w.raw = std::string(t.bytes(i, j));
  return w;
}

// Number with optional range suffix ("2-3", "2 – 3", "2 to 3") whose value is
// the midpoint.
std::optional<NumberSpan> parse_number(const CodePoints& t, std::size_t i) {
  auto first = parse_simple_number(t, i);
  if (!first) return std::nullopt;
  std::size_t k = skip_spaces(t, first->end);
  std::size_t after_sep = 0;
  if (t.at(k) == U'-' || t.at(k) == 0x2013) {
    after_sep = k + 1;
  } else if (auto w = word_at(t, k); w && w->folded == "to") {
    after_sep = w->end;
  }
  if (after_sep != 0) {
    const std::size_t s = skip_spaces(t, after_sep);
    if (auto second = parse_simple_number(t, s)) {
      return NumberSpan{(first->value + second->value) / 2.0, second->end};
    }
  }
  return first;
}

struct UnitAlias {
  const char* word;
  Unit unit;
  double factor;
};

constexpr UnitAlias kQuantityUnits[] = {
    {"g", Unit::Gram, 1.0},           {"gr", Unit::Gram, 1.0},
    {"gram", Unit::Gram, 1.0},        {"grams", Unit::Gram, 1.0},
    {"gramme", Unit::Gram, 1.0},      {"grammes", Unit::Gram, 1.0},
    {"kg", Unit::Gram, 1000.0},       {"kilo", Unit::Gram, 1000.0},
    {"kilos", Unit::Gram, 1000.0},    {"kilogram", Unit::Gram, 1000.0},
    {"kilograms", Unit::Gram, 1000.0}, {"mg", Unit::Gram, 0.001},
    {"milligram", Unit::Gram, 0.001}, {"milligrams", Unit::Gram, 0.001},
    {"ml", Unit::Millilitre, 1.0},    {"millilitre", Unit::Millilitre, 1.0},
    {"millilitres", Unit::Millilitre, 1.0}, {"milliliter", Unit::Millilitre, 1.0},
    {"milliliters", Unit::Millilitre, 1.0}, {"cl", Unit::Millilitre, 10.0},
    {"dl", Unit::Millilitre, 100.0},  {"l", Unit::Millilitre, 1000.0},
    {"litre", Unit::Millilitre, 1000.0}, {"litres", Unit::Millilitre, 1000.0},
    {"liter", Unit::Millilitre, 1000.0}, {"liters", Unit::Millilitre, 1000.0},
    {"tbsp", Unit::Millilitre, 15.0}, {"tbs", Unit::Millilitre, 15.0},
    {"tablespoon", Unit::Millilitre, 15.0}, {"tablespoons", Unit::Millilitre, 15.0},
    {"tsp", Unit::Millilitre, 5.0},   {"teaspoon", Unit::Millilitre, 5.0},
    {"teaspoons", Unit::Millilitre, 5.0}, {"cup", Unit::Millilitre, 240.0},
    {"cups", Unit::Millilitre, 240.0},
    // Count nouns consumed as pieces.
    {"piece", Unit::Piece, 1.0},      {"pieces", Unit::Piece, 1.0},
    {"pc", Unit::Piece, 1.0},         {"pcs", Unit::Piece, 1.0},
    {"clove", Unit::Piece, 1.0},      {"cloves", Unit::Piece, 1.0},
    {"pinch", Unit::Piece, 1.0},      {"pinches", Unit::Piece, 1.0},
    {"slice", Unit::Piece, 1.0},      {"slices", Unit::Piece, 1.0},
    {"can", Unit::Piece, 1.0},        {"cans", Unit::Piece, 1.0},
    {"sprig", Unit::Piece, 1.0},      {"sprigs", Unit::Piece, 1.0},
    {"bunch", Unit::Piece, 1.0},      {"bunches", Unit::Piece, 1.0},
    {"handful", Unit::Piece, 1.0},    {"handfuls", Unit::Piece, 1.0},
    {"stalk", Unit::Piece, 1.0},      {"stalks", Unit::Piece, 1.0},
    {"dash", Unit::Piece, 1.0},       {"dashes", Unit::Piece, 1.0},
};

struct TimeAlias {
  const char* word;
  double seconds;
};

constexpr TimeAlias kTimeUnits[] = {
    {"minutes", 60.0}, {"minute", 60.0}, {"mins", 60.0},   {"min", 60.0},
    {"hours", 3600.0}, {"hour", 3600.0}, {"hrs", 3600.0},  {"hr", 3600.0},
    {"h", 3600.0},     {"seconds", 1.0}, {"second", 1.0},  {"secs", 1.0},
    {"sec", 1.0},      {"s", 1.0},
};

// Unit word right after a number, allowing spaces or a single hyphen
// ("10-minute").
std::optional<Word> unit_word_after(const CodePoints& t, std::size_t i) {
  std::size_t k = skip_spaces(t, i);
  if (k == i && t.at(k) == U'-') k = k + 1;
  return word_at(t, k);
}

struct TimeHit {
  double seconds = 0.0;
  std::size_t end = 0;
};

std::optional<TimeHit> time_at(const CodePoints& t, std::size_t i) {
  if (!number_boundary(t, i)) return std::nullopt;
  auto num = parse_number(t, i);
  if (!num) return std::nullopt;
  auto w = unit_word_after(t, num->end);
  if (!w) return std::nullopt;
  for (const auto& alias : kTimeUnits) {
    if (w->folded == alias.word) return TimeHit{num->value * alias.seconds, w->end};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Head normalization.

const std::unordered_set<std::string>& descriptor_words() {
  static const std::unordered_set<std::string> words = {
      "large",   "small",    "medium",  "big",     "extra",   "fresh",   "freshly",
      "coarsely", "finely",  "roughly", "thinly",  "chopped", "diced",   "minced",
      "sliced",  "grated",   "shredded", "cubed",  "crushed", "softened", "melted",
      "beaten",  "peeled",   "ground",   "optional", "about",  "approximately", "ripe",
  };
  return words;
}

const std::unordered_set<std::string>& leading_stop_words() {
  static const std::unordered_set<std::string> words = {"of", "a", "an", "the", "some"};
  return words;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

std::vector<std::string> head_pass(std::vector<std::string> words) {
  std::vector<std::string> kept;
  for (auto& w : words) {
    if (!descriptor_words().contains(w)) kept.push_back(std::move(w));
  }
  std::size_t lead = 0;
  while (lead < kept.size() && leading_stop_words().contains(kept[lead])) ++lead;
  kept.erase(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(lead));
  if (!kept.empty()) kept.back() = singularize(kept.back());
  return kept;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

}  // namespace

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::Gram: return "g";
    case Unit::Millilitre: return "ml";
    case Unit::Piece: return "piece";
  }
  return "piece";
}

std::string_view builtin_lexicon_text() { return kBuiltinLexicon; }

std::string fold_text(std::string_view text) {
  const CodePoints t(text);
  std::string out;
  out.reserve(text.size());
  for (char32_t c : t.cp) append_folded(out, c);
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string folded = fold_text(text);
  for (char& c : folded) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && (std::ispunct(u) || std::isspace(u))) c = ' ';
  }
  return join_words(split_words(folded));
}

std::string singularize(std::string_view word) {
  static const std::unordered_map<std::string, std::string> irregular = {
      {"leaves", "leaf"},     {"halves", "half"},     {"loaves", "loaf"},
      {"knives", "knife"},    {"calves", "calf"},     {"cookies", "cookie"},
      {"pies", "pie"},        {"brownies", "brownie"}, {"ties", "tie"},
      {"anchovies", "anchovy"}, {"mice", "mouse"},    {"geese", "goose"},
  };
  static const std::unordered_set<std::string> invariant = {
      "asparagus", "couscous", "hummus", "molasses", "swiss",  "series", "species",
      "grits",     "oats",     "greens", "lentils",  "peas",   "chips",  "news",
  };
  std::string w(word);
  if (auto it = irregular.find(w); it != irregular.end()) return it->second;
  if (invariant.contains(w) || w.size() <= 3) return w;
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
  if (ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends_with(w, "oes")) return w.substr(0, w.size() - 2);
  if (ends_with(w, "sses") || ends_with(w, "ches") || ends_with(w, "shes") ||
      ends_with(w, "xes") || ends_with(w, "zes")) {
    return w.substr(0, w.size() - 2);
  }
  if (ends_with(w, "s")) return w.substr(0, w.size() - 1);
  return w;
}

std::string normalize_head(std::string_view text) {
  std::string cut(text.substr(0, text.find(',')));
  std::string plain;
  int depth = 0;
  for (char c : cut) {
    if (c == '(' || c == '[') {
      ++depth;
    } else if ((c == ')' || c == ']') && depth > 0) {
      --depth;
    } else if (depth == 0) {
      plain.push_back(c);
    }
  }
  std::string folded = fold_text(plain);
  for (char& c : folded) {
    if (!(c >= 'a' && c <= 'z')) c = ' ';
  }
  std::vector<std::string> words = split_words(folded);
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<std::string> next = head_pass(words);
    if (next.empty()) break;  // keep the unfiltered words rather than an empty head
    if (next == words) break;
    words = std::move(next);
  }
  return join_words(words);
}

IngredientEntry parse_ingredient(std::string_view line) {
  const CodePoints t(line);
  if (std::none_of(t.cp.begin(), t.cp.end(), is_letter)) {
    throw Error(ErrorKind::UnparsableIngredient,
                fmt::format("no alphabetic content in ingredient line '{}'", line));
  }
  IngredientEntry entry;
  entry.raw = std::string(line);
  std::string remainder(line);

  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!number_boundary(t, i)) continue;
    auto num = parse_number(t, i);
    if (!num) continue;
    std::size_t end = num->end;
    QuantityMention q{num->value, Unit::Piece, {}};
    if (auto w = unit_word_after(t, num->end)) {
      for (const auto& alias : kQuantityUnits) {
        if (w->folded == alias.word) {
          q.unit = alias.unit;
          q.value = num->value * alias.factor;
          end = w->end;
          break;
        }
      }
    }
    if (q.value > 0.0) {
      q.raw = std::string(t.bytes(i, end));
      remainder = std::string(t.bytes(0, i)) + " " + std::string(t.bytes(end, t.size()));
      entry.quantity = std::move(q);
    }
    break;
  }

  entry.head = normalize_head(remainder);
  if (entry.head.empty()) {
    throw Error(ErrorKind::UnparsableIngredient,
                fmt::format("no ingredient name in line '{}'", line));
  }
  return entry;
}

std::vector<TimeMention> extract_times(std::string_view step) {
  const CodePoints t(step);
  std::vector<TimeMention> out;
  std::size_t i = 0;
  while (i < t.size()) {
    auto hit = time_at(t, i);
    if (!hit) {
      ++i;
      continue;
    }
    double seconds = hit->seconds;
    std::size_t end = hit->end;
    // Compounds: "1 hour 20 minutes", "1 hour and 20 minutes", "1 h, 5 min".
    for (;;) {
      std::size_t k = skip_spaces(t, end);
      if (t.at(k) == U',') k = skip_spaces(t, k + 1);
      if (auto w = word_at(t, k); w && w->folded == "and") k = skip_spaces(t, w->end);
      auto next = time_at(t, k);
      if (!next) break;
      seconds += next->seconds;
      end = next->end;
    }
    if (seconds > 0.0) out.push_back(TimeMention{seconds, std::string(t.bytes(i, end))});
    i = end;
  }
  return out;
}

std::vector<TemperatureMention> extract_temperatures(std::string_view step) {
  const CodePoints t(step);
  std::vector<TemperatureMention> out;
  std::size_t i = 0;
  while (i < t.size()) {
    std::size_t start = i;
    bool negative = false;
    if (t.at(i) == U'-' && (i == 0 || is_space(t.cp[i - 1]) || t.cp[i - 1] == U'(') &&
        is_digit(t.at(i + 1))) {
      negative = true;
      ++i;
    }
    if (!number_boundary(t, i) && !negative) {
      ++i;
      continue;
    }
    auto num = parse_number(t, i);
    if (!num) {
      i = start + 1;
      continue;
    }

    enum class Scale { None, Celsius, Fahrenheit } scale = Scale::None;
    std::size_t end = num->end;
    std::size_t k = skip_spaces(t, num->end);
    auto scale_word = [](const Word& w) {
      if (w.folded == "c" || w.folded == "celsius" || w.folded == "centigrade") return Scale::Celsius;
      if (w.folded == "f" || w.folded == "fahrenheit") return Scale::Fahrenheit;
      return Scale::None;
    };
    if (t.at(k) == 0xB0 || t.at(k) == 0xBA) {
      scale = Scale::Celsius;
      end = k + 1;
      if (auto w = word_at(t, skip_spaces(t, k + 1))) {
        if (Scale s = scale_word(*w); s != Scale::None) {
          scale = s;
          end = w->end;
        }
      }
    } else if (auto w = word_at(t, k)) {
      if (w->folded == "degrees" || w->folded == "degree" || w->folded == "deg") {
        scale = Scale::Celsius;
        end = w->end;
        if (auto w2 = word_at(t, skip_spaces(t, w->end))) {
          if (Scale s = scale_word(*w2); s != Scale::None) {
            scale = s;
            end = w2->end;
          }
        }
      } else if (w->folded == "celsius" || w->folded == "centigrade" || w->folded == "fahrenheit" ||
                 w->raw == "C" || w->raw == "F") {
        scale = scale_word(*w);
        end = w->end;
        if (auto w2 = word_at(t, skip_spaces(t, w->end));
            w2 && (w2->folded == "degrees" || w2->folded == "degree")) {
          end = w2->end;
        }
      }
    }
    if (scale == Scale::None) {
      i = num->end;
      continue;
    }
    double value = negative ? -num->value : num->value;
    if (scale == Scale::Fahrenheit) value = (value - 32.0) * 5.0 / 9.0;
    out.push_back(TemperatureMention{value, std::string(t.bytes(start, end)),
                                     value >= kMinPlausibleCelsius && value <= kMaxPlausibleCelsius});
    i = end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Action lexicon.

const ActionLexicon& ActionLexicon::builtin() {
  static const ActionLexicon lexicon = from_text(kBuiltinLexicon);
  return lexicon;
}

ActionLexicon ActionLexicon::from_text(std::string_view text) {
  ActionLexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto words = split_words(line);
    if (words.empty()) continue;
    const std::string& verb = words.front();
    const std::string base = fold_text(verb);
    if (lex.forms_.contains(base)) continue;
    const std::size_t idx = lex.verbs_.size();
    lex.verbs_.push_back(verb);

    std::vector<std::string> forms = {base, base + "s", base + "es", base + "ed", base + "ing"};
    const char last = base.back();
    if (last == 'e') {
      forms.push_back(base + "d");
      forms.push_back(base.substr(0, base.size() - 1) + "ing");
    }
    if (last == 'y' && base.size() > 1 && !is_vowel(base[base.size() - 2])) {
      const std::string stem = base.substr(0, base.size() - 1);
      forms.push_back(stem + "ies");
      forms.push_back(stem + "ied");
    }
    if (base.size() >= 3 && !is_vowel(last) && last != 'w' && last != 'x' && last != 'y' &&
        is_vowel(base[base.size() - 2]) && !is_vowel(base[base.size() - 3])) {
      forms.push_back(base + last + "ed");
      forms.push_back(base + last + "ing");
    }
    for (const auto& f : forms) lex.forms_.emplace(f, idx);
  }
  if (lex.verbs_.empty()) throw Error(ErrorKind::InvalidConfig, "action lexicon is empty");
  return lex;
}

ActionLexicon ActionLexicon::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidConfig, fmt::format("cannot read lexicon '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

std::optional<std::string> ActionLexicon::match(std::string_view folded_word) const {
  auto it = forms_.find(std::string(folded_word));
  if (it == forms_.end()) return std::nullopt;
  return verbs_[it->second];
}

std::vector<ActionMention> extract_actions(std::string_view step, const ActionLexicon& lexicon,
                                           std::size_t step_index) {
  const CodePoints t(step);
  std::vector<ActionMention> out;
  std::size_t i = 0;
  while (i < t.size()) {
    auto w = word_at(t, i);
    if (!w) {
      ++i;
      continue;
    }
    if (auto verb = lexicon.match(w->folded)) out.push_back(ActionMention{*verb, step_index});
    i = w->end;
  }
  return out;
}

}  // namespace otloss
