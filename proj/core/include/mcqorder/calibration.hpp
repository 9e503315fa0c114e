// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcqorder/eval.hpp"
#include "mcqorder/parsers.hpp"
#include "mcqorder/types.hpp"

namespace mcqorder {

enum class CalibrationMethod { majority_vote, mec };

std::string to_string(CalibrationMethod method);
CalibrationMethod calibration_method_from(const std::string& text);

struct CalibrationConfig {
  CalibrationMethod method = CalibrationMethod::majority_vote;
  int k = 10;                    // reorder count for majority vote
  std::uint64_t seed = 0;
  bool include_identity = false; // force the identity into the sampled reorders
};

/// Majority-vote outcome for one item. prediction is empty only when every
/// reorder produced an unparseable reply.
struct VoteOutcome {
  std::optional<Prediction> prediction;
  std::map<int, int> tally;  // canonical index -> votes
  int non_votes = 0;
};

/// Queries the item under k distinct random reorders (k clamped to n!) and
/// takes the plurality of canonical-index votes. Ties break to the first
/// sampled ordering's prediction, then to the lowest canonical index.
VoteOutcome majority_vote_predict(CompletionClient& client, const std::string& model_id,
                                  const MCQItem& item, int k, std::uint64_t seed,
                                  bool include_identity, const RunOptions& options);

/// Explanation-first outcome. prediction is empty when the reply has no
/// final answer line (recorded as an abstention by callers).
struct MecOutcome {
  std::optional<Prediction> prediction;
  std::string explanation;
  std::string raw;
};

/// Renders the explanation-first template (identity order), then parses
/// only the final "Answer: <letter>" line.
MecOutcome mec_predict(CompletionClient& client, const std::string& model_id,
                       const MCQItem& item, const RunOptions& options);

struct CalibratedResult {
  CalibrationMethod method = CalibrationMethod::majority_vote;
  double accuracy_pct = 0.0;
  double vanilla_acc = 0.0;
  double delta_vs_vanilla = 0.0;
  int correct = 0;
  int total = 0;
  int abstentions = 0;
  std::vector<std::map<int, int>> votes_per_item;  // majority vote only
};

/// Applies the configured calibrator to every item. The delta is measured
/// against vanilla_override when provided, otherwise against a freshly
/// computed vanilla accuracy. Per-item randomness derives from config.seed
/// and the item's index.
CalibratedResult calibrated_evaluate(CompletionClient& client, const std::string& model_id,
                                     const Dataset& dataset, const CalibrationConfig& config,
                                     const RunOptions& options,
                                     std::optional<double> vanilla_override = std::nullopt);

}  // namespace mcqorder
