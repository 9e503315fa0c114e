// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/sensitivity.hpp"

#include <cmath>

namespace mcqorder {

namespace {

double percent(int numerator, int denominator) {
  if (denominator == 0) return 0.0;
  return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

EvalOutcome evaluate_vanilla(CompletionClient& client, const std::string& model_id,
                             const Dataset& dataset, const FewShotConfig& fewshot,
                             const RunOptions& options) {
  validate_dataset(dataset);
  const int total = static_cast<int>(dataset.items.size());
  std::vector<int> correct(static_cast<size_t>(total), 0);
  std::vector<int> abstained(static_cast<size_t>(total), 0);
  parallel_map(total, options.workers, [&](int i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const OrderedItem ordered = apply_ordering(item, Ordering::identity(item.option_count()));
    const auto prediction = query_choice(client, model_id, ordered, fewshot, options);
    if (!prediction) {
      abstained[static_cast<size_t>(i)] = 1;
    } else if (prediction->canonical_index == item.gold_index) {
      correct[static_cast<size_t>(i)] = 1;
    }
  });
  EvalOutcome outcome;
  outcome.total = total;
  for (int i = 0; i < total; ++i) {
    outcome.correct += correct[static_cast<size_t>(i)];
    outcome.abstained += abstained[static_cast<size_t>(i)];
  }
  outcome.accuracy_pct = percent(outcome.correct, outcome.total);
  return outcome;
}

std::string SearchMode::to_string() const {
  if (exhaustive) return "exhaustive";
  return "sampled(budget=" + std::to_string(budget) + ",seed=" + std::to_string(seed) + ")";
}

SensitivityReport oracle_minmax(CompletionClient& client, const std::string& model_id,
                                const Dataset& dataset, const FewShotConfig& fewshot,
                                const Budget& budget, std::uint64_t seed,
                                const RunOptions& options) {
  validate_dataset(dataset);
  const int total = static_cast<int>(dataset.items.size());
  SensitivityReport report;
  report.task_id = dataset.task_id;
  report.model_id = model_id;
  report.shots = fewshot.shots;
  report.search_mode.exhaustive = budget.is_exhaustive;
  report.search_mode.budget = budget.count;
  report.search_mode.seed = seed;
  report.per_item.assign(static_cast<size_t>(total), ItemSensitivity{});

  parallel_map(total, options.workers, [&](int i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const int n = item.option_count();
    const std::vector<Ordering> orderings =
        enumerate_orderings(n, budget, item_seed(seed, static_cast<std::uint64_t>(i)));
    // Demonstrations are selected once per item and held fixed while the
    // target's ordering varies.
    const std::vector<MCQItem> demos = demos_for(item, fewshot);

    ItemSensitivity sense;
    sense.item_id = item.id;
    sense.orderings_tested = static_cast<int>(orderings.size());
    sense.always_correct = true;
    bool first = true;
    bool have_constant = true;
    std::optional<int> constant_value;
    for (const Ordering& ordering : orderings) {
      const OrderedItem ordered = apply_ordering(item, ordering);
      const auto prediction =
          query_choice_with_demos(client, model_id, ordered, demos, fewshot, options);
      const std::optional<int> canon =
          prediction ? std::optional<int>(prediction->canonical_index) : std::nullopt;
      const bool correct = canon.has_value() && *canon == item.gold_index;
      if (ordering.is_identity() && first) sense.vanilla_correct = correct;
      sense.exists_correct = sense.exists_correct || correct;
      sense.always_correct = sense.always_correct && correct;
      // Abstentions count as a distinct "no answer" prediction value.
      if (first) {
        constant_value = canon;
      } else if (canon != constant_value) {
        have_constant = false;
      }
      first = false;
    }
    sense.is_sensitive = !have_constant;
    report.per_item[static_cast<size_t>(i)] = std::move(sense);
  });

  int vanilla = 0;
  int exists = 0;
  int always = 0;
  for (const auto& sense : report.per_item) {
    vanilla += sense.vanilla_correct ? 1 : 0;
    exists += sense.exists_correct ? 1 : 0;
    always += sense.always_correct ? 1 : 0;
  }
  report.vanilla_acc = percent(vanilla, total);
  report.max_acc = percent(exists, total);
  report.min_acc = percent(always, total);
  report.gap = report.max_acc - report.min_acc;
  return report;
}

double sensitivity_correlation(const std::vector<std::pair<double, double>>& pairs) {
  const size_t n = pairs.size();
  if (n < 3) throw ConfigError("correlation needs at least 3 pairs");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : pairs) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    const double dx = x - mean_x;
    const double dy = y - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateVariance("correlation undefined: a series is constant");
  }
  return sxy / std::sqrt(sxx * syy);
}

SelfVerifyOutcome self_verification_rate(CompletionClient& client, const std::string& model_id,
                                         const std::vector<MCQItem>& items,
                                         const RunOptions& options) {
  const int total = static_cast<int>(items.size());
  std::vector<int> yes(static_cast<size_t>(total), 0);
  std::vector<int> abstained(static_cast<size_t>(total), 0);
  parallel_map(total, options.workers, [&](int i) {
    const MCQItem& item = items[static_cast<size_t>(i)];
    const OrderedItem ordered = apply_ordering(item, Ordering::identity(item.option_count()));
    ModelRequest request;
    request.model_id = model_id;
    request.prompt = render_self_verification_prompt(options.templates, ordered);
    request.max_tokens = options.yes_no_max_tokens;
    request.temperature = options.temperature;
    const ModelResponse response = client.complete(request);
    const auto verdict = parse_yes_no(response.text);
    if (!verdict) {
      abstained[static_cast<size_t>(i)] = 1;
    } else if (*verdict) {
      yes[static_cast<size_t>(i)] = 1;
    }
  });
  SelfVerifyOutcome outcome;
  outcome.total = total;
  for (int i = 0; i < total; ++i) {
    outcome.yes += yes[static_cast<size_t>(i)];
    outcome.abstained += abstained[static_cast<size_t>(i)];
  }
  outcome.yes_pct = percent(outcome.yes, outcome.total);
  return outcome;
}

}  // namespace mcqorder
