// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcqorder/eval.hpp"
#include "mcqorder/orderings.hpp"
#include "mcqorder/types.hpp"

namespace mcqorder {

struct EvalOutcome {
  double accuracy_pct = 0.0;
  int correct = 0;
  int total = 0;
  int abstained = 0;  // unparseable responses, scored incorrect
};

/// Accuracy under the dataset's original (identity) option order.
EvalOutcome evaluate_vanilla(CompletionClient& client, const std::string& model_id,
                             const Dataset& dataset, const FewShotConfig& fewshot,
                             const RunOptions& options);

struct ItemSensitivity {
  std::string item_id;
  bool vanilla_correct = false;
  bool exists_correct = false;   // some tested ordering yields gold
  bool always_correct = false;   // every tested ordering yields gold
  int orderings_tested = 0;
  bool is_sensitive = false;     // prediction not constant across orderings
};

struct SearchMode {
  bool exhaustive = true;
  std::uint64_t budget = 0;  // total orderings per item when sampled
  std::uint64_t seed = 0;
  std::string to_string() const;
};

struct SensitivityReport {
  std::string task_id;
  std::string model_id;
  int shots = 0;
  double vanilla_acc = 0.0;
  double min_acc = 0.0;  // % items correct under every tested ordering
  double max_acc = 0.0;  // % items correct under some tested ordering
  double gap = 0.0;      // max_acc - min_acc
  SearchMode search_mode;
  std::vector<ItemSensitivity> per_item;
};

/// Queries each item under every ordering the budget admits (identity
/// always included and listed first) and aggregates best-case/worst-case
/// accuracy. Sampled searches use a per-item seed derived from `seed`, so
/// items are independent of each other and of dataset order.
SensitivityReport oracle_minmax(CompletionClient& client, const std::string& model_id,
                                const Dataset& dataset, const FewShotConfig& fewshot,
                                const Budget& budget, std::uint64_t seed,
                                const RunOptions& options);

/// Pearson correlation over (gap, error_rate) pairs. Needs >= 3 pairs;
/// throws DegenerateVariance when either series is constant.
double sensitivity_correlation(const std::vector<std::pair<double, double>>& pairs);

struct SelfVerifyOutcome {
  double yes_pct = 0.0;
  int yes = 0;
  int total = 0;
  int abstained = 0;  // responses with neither yes nor no
};

/// Asks the verification question ("can more than one choice be highly
/// probable?") for each item under identity order. Callers typically pass
/// the is_sensitive subset of a SensitivityReport's items.
SelfVerifyOutcome self_verification_rate(CompletionClient& client, const std::string& model_id,
                                         const std::vector<MCQItem>& items,
                                         const RunOptions& options);

}  // namespace mcqorder
