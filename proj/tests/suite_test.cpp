// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/suite.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

namespace mcqorder {
namespace {

SuiteConfig small_config() {
  SuiteConfig config;
  config.item_count = 40;
  config.option_counts = {4};
  config.uncertain_frac = 0.3;
  config.delta = 0.05;
  config.seed = 11;
  return config;
}

TEST(GenerateSuite, CountsAndUncertainFraction) {
  GeneratedSuite suite = generate_suite(small_config());
  EXPECT_EQ(suite.dataset.items.size(), 40u);
  EXPECT_EQ(suite.uncertain.size(), 40u);
  long uncertain =
      std::count(suite.uncertain.begin(), suite.uncertain.end(), true);
  EXPECT_EQ(uncertain, std::lround(0.3 * 40));
  validate_dataset(suite.dataset);
}

TEST(GenerateSuite, OptionCountsCycle) {
  SuiteConfig config = small_config();
  config.item_count = 7;
  config.option_counts = {3, 5};
  GeneratedSuite suite = generate_suite(config);
  ASSERT_EQ(suite.dataset.items.size(), 7u);
  for (size_t i = 0; i < suite.dataset.items.size(); ++i) {
    int expected = config.option_counts[i % 2];
    EXPECT_EQ(suite.dataset.items[i].option_count(), expected) << "item " << i;
  }
}

TEST(GenerateSuite, GoldUtilityIsTheUniqueMaximum) {
  GeneratedSuite suite = generate_suite(small_config());
  for (const auto& item : suite.dataset.items) {
    std::vector<double> u = suite.model.utilities_for(item.question, item.options);
    size_t gold = static_cast<size_t>(item.gold_index);
    for (size_t i = 0; i < u.size(); ++i) {
      if (i == gold) continue;
      EXPECT_LT(u[i], u[gold]) << item.id;
    }
  }
}

TEST(GenerateSuite, MarginsLandInTheDocumentedBands) {
  GeneratedSuite suite = generate_suite(small_config());
  const double delta = 0.05;
  for (size_t idx = 0; idx < suite.dataset.items.size(); ++idx) {
    const auto& item = suite.dataset.items[idx];
    std::vector<double> u = suite.model.utilities_for(item.question, item.options);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double margin = u[0] - u[1];
    if (suite.uncertain[idx]) {
      EXPECT_GT(margin, 0.2 * delta) << item.id;
      EXPECT_LT(margin, 0.8 * delta) << item.id;
    } else {
      EXPECT_GT(margin, 1.5 * delta) << item.id;
      EXPECT_LT(margin, 3.0 * delta) << item.id;
    }
  }
}

TEST(GenerateSuite, DeterministicInSeed) {
  GeneratedSuite a = generate_suite(small_config());
  GeneratedSuite b = generate_suite(small_config());
  ASSERT_EQ(a.dataset.items.size(), b.dataset.items.size());
  for (size_t i = 0; i < a.dataset.items.size(); ++i) {
    EXPECT_EQ(a.dataset.items[i].question, b.dataset.items[i].question);
    EXPECT_EQ(a.dataset.items[i].options, b.dataset.items[i].options);
    EXPECT_EQ(a.dataset.items[i].gold_index, b.dataset.items[i].gold_index);
    EXPECT_EQ(a.model.utilities_for(a.dataset.items[i].question,
                                    a.dataset.items[i].options),
              b.model.utilities_for(b.dataset.items[i].question,
                                    b.dataset.items[i].options));
  }
  EXPECT_EQ(a.uncertain, b.uncertain);

  SuiteConfig other = small_config();
  other.seed = 12;
  GeneratedSuite c = generate_suite(other);
  bool any_difference = false;
  for (size_t i = 0; i < a.dataset.items.size() && !any_difference; ++i) {
    if (a.dataset.items[i].question != c.dataset.items[i].question ||
        a.uncertain[i] != c.uncertain[i]) {
      any_difference = true;
    }
  }
  EXPECT_TRUE(any_difference);
}

TEST(GenerateSuite, ModelCarriesConfiguredBiasAndTheta) {
  SuiteConfig config = small_config();
  config.bias = {0.05, 0.0, 0.0, 0.0};
  config.theta = 0.07;
  GeneratedSuite suite = generate_suite(config);
  EXPECT_EQ(suite.model.bias(), config.bias);
  EXPECT_EQ(suite.model.theta(), 0.07);
}

TEST(GenerateSuite, OptionTextsAreUniquePerItem) {
  GeneratedSuite suite = generate_suite(small_config());
  for (const auto& item : suite.dataset.items) {
    std::vector<std::string> options = item.options;
    std::sort(options.begin(), options.end());
    EXPECT_EQ(std::adjacent_find(options.begin(), options.end()),
              options.end())
        << item.id;
  }
}

}  // namespace
}  // namespace mcqorder
