// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "otloss/error.hpp"
#include "otloss/extraction.hpp"

namespace otloss {
namespace {

std::vector<std::string> verbs_of(std::string_view step, const ActionLexicon& lex = ActionLexicon::builtin()) {
  std::vector<std::string> out;
  for (const auto& a : extract_actions(step, lex)) out.push_back(a.verb);
  return out;
}

void expect_quantity(std::string_view line, std::string_view head, double value, Unit unit) {
  const auto e = parse_ingredient(line);
  EXPECT_EQ(e.head, head) << line;
  ASSERT_TRUE(e.quantity.has_value()) << line;
  EXPECT_NEAR(e.quantity->value, value, 1e-9 * std::max(1.0, value)) << line;
  EXPECT_EQ(e.quantity->unit, unit) << line;
}

TEST(ParseIngredient, CarbonaraListing) {
  expect_quantity("200g Guanciale, cubed", "guanciale", 200, Unit::Gram);
  expect_quantity("4 large egg yolks", "egg yolk", 4, Unit::Piece);
  expect_quantity("50g Pecorino Romano cheese, grated", "pecorino romano cheese", 50, Unit::Gram);
  expect_quantity("320g Spaghetti", "spaghetti", 320, Unit::Gram);
  const auto salt = parse_ingredient("Salt");
  EXPECT_EQ(salt.head, "salt");
  EXPECT_FALSE(salt.quantity.has_value());
  EXPECT_EQ(parse_ingredient("Coarsely ground black pepper").head, "black pepper");
}

TEST(ParseIngredient, UnitAliasesFoldToMetric) {
  expect_quantity("1.5 kg potatoes", "potato", 1500, Unit::Gram);
  expect_quantity("2 l water", "water", 2000, Unit::Millilitre);
  expect_quantity("3 tbsp olive oil", "olive oil", 45, Unit::Millilitre);
  expect_quantity("2 tsp sugar", "sugar", 10, Unit::Millilitre);
  expect_quantity("1 cup milk", "milk", 240, Unit::Millilitre);
  expect_quantity("200 g pasta", "pasta", 200, Unit::Gram);
  expect_quantity("3 cloves garlic", "garlic", 3, Unit::Piece);
}

TEST(ParseIngredient, FractionsAndRanges) {
  expect_quantity("½ tsp salt", "salt", 2.5, Unit::Millilitre);
  expect_quantity("1 ½ cups flour", "flour", 360, Unit::Millilitre);
  expect_quantity("1/4 cup cream", "cream", 60, Unit::Millilitre);
  expect_quantity("2-3 carrots", "carrot", 2.5, Unit::Piece);
}

TEST(ParseIngredient, NoAlphabeticContent) {
  try {
    parse_ingredient("200 / 3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnparsableIngredient);
  }
}

TEST(NormalizeHead, Idempotent) {
  for (const char* line : {"200g Guanciale, cubed", "4 large egg yolks", "Tomatoes (peeled)",
                           "fresh basil leaves", "2 potatoes", "berries", "Salt"}) {
    const std::string head = parse_ingredient(line).head;
    EXPECT_EQ(normalize_head(head), head) << line;
    EXPECT_EQ(parse_ingredient(head).head, head) << line;
  }
}

TEST(Singularize, SuffixRulesAndExceptions) {
  EXPECT_EQ(singularize("yolks"), "yolk");
  EXPECT_EQ(singularize("berries"), "berry");
  EXPECT_EQ(singularize("tomatoes"), "tomato");
  EXPECT_EQ(singularize("dishes"), "dish");
  EXPECT_EQ(singularize("leaves"), "leaf");
  EXPECT_EQ(singularize("asparagus"), "asparagus");
  EXPECT_EQ(singularize("molasses"), "molasses");
  EXPECT_EQ(singularize("egg"), "egg");
}

TEST(ExtractTimes, Examples) {
  auto t = extract_times("boil for 10 minutes");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].seconds, 600.0);
  EXPECT_TRUE(extract_times("serve immediately").empty());
  t = extract_times("bake 1 hour 20 minutes");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].seconds, 4800.0);
  t = extract_times("cook 2-3 minutes, then rest 30 sec");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].seconds, 150.0);
  EXPECT_EQ(t[1].seconds, 30.0);
  t = extract_times("leave for 2 h");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].seconds, 7200.0);
}

TEST(ExtractTemperatures, Examples) {
  auto t = extract_temperatures("boil pasta at 100 Celsius degrees");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].celsius, 100.0);
  t = extract_temperatures("350°F");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0].celsius, 176.67, 0.005);
  EXPECT_TRUE(extract_temperatures("stir well").empty());
  t = extract_temperatures("preheat to 220 °C, then lower to 180 degrees");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].celsius, 220.0);
  EXPECT_EQ(t[1].celsius, 180.0);
  t = extract_temperatures("freeze at -18°C");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].celsius, -18.0);
  t = extract_temperatures("heat to 900 degrees");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_FALSE(t[0].plausible);
}

TEST(ExtractActions, Examples) {
  EXPECT_EQ(verbs_of("Fry the guanciale in a skillet until crispy."), std::vector<std::string>{"fry"});
  EXPECT_EQ(verbs_of("Boil salted water in a large pot."), std::vector<std::string>{"boil"});
  EXPECT_EQ(verbs_of("Combine egg yolks, Pecorino, and pepper"), std::vector<std::string>{"combine"});
  EXPECT_EQ(verbs_of("Sauté the onions, then saute the garlic"),
            (std::vector<std::string>{"sauté", "sauté"}));
  EXPECT_EQ(verbs_of("Stirring constantly, the sauce simmered; fried eggs"),
            (std::vector<std::string>{"stir", "simmer", "fry"}));
  EXPECT_TRUE(verbs_of("A boiler is not a verb.").empty());
}

TEST(ExtractActions, PositionIsStepIndex) {
  const auto a = extract_actions("Mix and bake.", ActionLexicon::builtin(), 4);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].position, 4u);
}

TEST(ActionLexicon, BuiltinMatchesDataFile) {
  const auto path = std::filesystem::path(OTLOSS_SOURCE_DIR) / "data" / "actions.txt";
  const ActionLexicon file = ActionLexicon::from_file(path);
  EXPECT_EQ(file.verbs(), ActionLexicon::builtin().verbs());
  EXPECT_EQ(file.verbs().size(), 40u);
}

TEST(ActionLexicon, CustomTextAndErrors) {
  const ActionLexicon lex = ActionLexicon::from_text("# custom\nflambé\n\nzest  # comment\n");
  EXPECT_EQ(lex.verbs(), (std::vector<std::string>{"flambé", "zest"}));
  EXPECT_EQ(verbs_of("Flambe the pan, then zested lemons; boil.", lex),
            (std::vector<std::string>{"flambé", "zest"}));
  EXPECT_THROW(ActionLexicon::from_text("# nothing\n"), Error);
}

TEST(FoldText, AccentsAndCase) {
  EXPECT_EQ(fold_text("Sauté CRÈME Brûlée"), "saute creme brulee");
  EXPECT_EQ(normalize_text("Boil, then   SERVE!"), "boil then serve");
}

// Canonical templates with random values; each must be recovered exactly in
// its own category.
TEST(RoundTrip, TemplatedSentences) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> cents(1, 99999);
  for (int i = 0; i < 100; ++i) {
    const double v = cents(rng) / 100.0;
    const auto e = parse_ingredient(fmt::format("{}g flour", v));
    ASSERT_TRUE(e.quantity.has_value());
    EXPECT_NEAR(e.quantity->value, v, 1e-9);
    EXPECT_EQ(e.quantity->unit, Unit::Gram);

    const auto t = extract_times(fmt::format("simmer for {} minutes", v));
    ASSERT_EQ(t.size(), 1u);
    EXPECT_NEAR(t[0].seconds, 60.0 * v, 1e-9);

    const double c = cents(rng) / 400.0;
    const auto temp = extract_temperatures(fmt::format("bake at {}°C", c));
    ASSERT_EQ(temp.size(), 1u);
    EXPECT_NEAR(temp[0].celsius, c, 1e-9);
  }
}

}  // namespace
}  // namespace otloss
