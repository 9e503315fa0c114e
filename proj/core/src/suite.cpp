// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace mcqorder {

namespace {

std::string format_index(int index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d", index);
  return buffer;
}

}  // namespace

GeneratedSuite generate_suite(const SuiteConfig& config) {
  if (config.item_count < 1) throw ConfigError("suite item_count must be positive");
  if (config.option_counts.empty()) throw ConfigError("suite option_counts must be non-empty");
  for (const int n : config.option_counts) {
    if (n < kMinOptions || n > 12) {
      throw ConfigError("suite option counts must be in [2, 12]");
    }
  }
  if (config.delta <= 0.0) throw ConfigError("suite delta must be positive");
  if (config.uncertain_frac < 0.0 || config.uncertain_frac > 1.0) {
    throw ConfigError("uncertain_frac must be in [0, 1]");
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int uncertain_count =
      static_cast<int>(std::llround(config.uncertain_frac * config.item_count));
  std::vector<int> order(static_cast<size_t>(config.item_count));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> uncertain(static_cast<size_t>(config.item_count), false);
  for (int i = 0; i < uncertain_count; ++i) uncertain[static_cast<size_t>(order[i])] = true;

  GeneratedSuite suite;
  suite.dataset.task_id = "generated-suite";
  suite.uncertain = uncertain;
  suite.model.set_bias(config.bias);
  suite.model.set_theta(config.theta);

  for (int i = 0; i < config.item_count; ++i) {
    const int n = config.option_counts[static_cast<size_t>(i) % config.option_counts.size()];
    const std::string tag = format_index(i);
    MCQItem item;
    item.id = "item" + tag;
    item.question = "Q" + tag + ": which option is flagged for record " + tag + "?";
    for (int j = 0; j < n; ++j) {
      item.options.push_back("item" + tag + "-opt" + std::to_string(j));
    }
    item.gold_index = i % n;
    validate_item(item);

    // Margins keep the gold argmax unique: uncertain items sit strictly
    // inside (0, delta), certain items strictly above delta.
    const double margin = uncertain[static_cast<size_t>(i)]
                              ? config.delta * (0.2 + 0.6 * unit(rng))
                              : config.delta * (1.5 + 1.5 * unit(rng));
    const int runner_up = (item.gold_index + 1) % n;
    std::vector<double> utilities(static_cast<size_t>(n), 0.0);
    utilities[static_cast<size_t>(item.gold_index)] = 1.0;
    utilities[static_cast<size_t>(runner_up)] = 1.0 - margin;
    int filler = 0;
    for (int j = 0; j < n; ++j) {
      if (j == item.gold_index || j == runner_up) continue;
      utilities[static_cast<size_t>(j)] = 0.5 - 0.04 * filler;
      ++filler;
    }

    suite.model.register_item(item.question, item.options, utilities);
    suite.dataset.items.push_back(std::move(item));
  }
  validate_dataset(suite.dataset);
  return suite;
}

}  // namespace mcqorder
