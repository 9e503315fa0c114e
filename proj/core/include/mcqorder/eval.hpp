// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "mcqorder/client.hpp"
#include "mcqorder/parsers.hpp"
#include "mcqorder/prompting.hpp"
#include "mcqorder/types.hpp"

namespace mcqorder {

/// Knobs shared by every experiment driver.
struct RunOptions {
  TemplateSet templates = TemplateSet::defaults();
  int workers = 1;
  double temperature = 0.0;
  int answer_max_tokens = 16;
  int yes_no_max_tokens = 8;
  int sort_max_tokens = 64;
  int mec_max_tokens = 512;
};

/// Few-shot configuration. shots == 0 means zero-shot; otherwise pool must
/// be set. Demonstrations are selected per target item and held fixed while
/// the target's ordering varies; co_reorder_demos additionally applies the
/// target's ordering to same-size demonstrations (ablation).
struct FewShotConfig {
  int shots = 0;
  const DemonstrationPool* pool = nullptr;
  DemoOrderingPolicy policy = DemoOrderingPolicy::canonical;
  std::uint64_t demo_seed = 0;
  bool co_reorder_demos = false;
};

/// Renders the answer prompt for one ordered item (few-shot aware), calls
/// the model, and parses the choice. nullopt = abstention.
std::optional<Prediction> query_choice(CompletionClient& client, const std::string& model_id,
                                       const OrderedItem& ordered, const FewShotConfig& fewshot,
                                       const RunOptions& options);

/// Same, but with the demonstrations pre-selected (used when the target's
/// ordering varies and demos must stay fixed).
std::optional<Prediction> query_choice_with_demos(CompletionClient& client,
                                                  const std::string& model_id,
                                                  const OrderedItem& ordered,
                                                  const std::vector<MCQItem>& demos,
                                                  const FewShotConfig& fewshot,
                                                  const RunOptions& options);

/// Selects demonstrations for a target according to the few-shot config.
/// Returns an empty list for zero-shot. Throws ConfigError when shots > 0
/// without a pool.
std::vector<MCQItem> demos_for(const MCQItem& target, const FewShotConfig& fewshot);

/// Runs fn(0..count-1) across `workers` threads. Results are aggregated by
/// index, so the outcome is independent of scheduling; the lowest-index
/// exception is rethrown.
void parallel_map(int count, int workers, const std::function<void(int)>& fn);

}  // namespace mcqorder
