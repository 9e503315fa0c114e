// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/calibration.hpp"

#include <algorithm>

#include "mcqorder/orderings.hpp"
#include "mcqorder/sensitivity.hpp"

namespace mcqorder {

std::string to_string(CalibrationMethod method) {
  return method == CalibrationMethod::majority_vote ? "majority-vote" : "mec";
}

CalibrationMethod calibration_method_from(const std::string& text) {
  if (text == "majority-vote" || text == "majority_vote" || text == "vote") {
    return CalibrationMethod::majority_vote;
  }
  if (text == "mec" || text == "explanation-first") return CalibrationMethod::mec;
  throw ConfigError("unknown calibration method '" + text +
                    "' (expected majority-vote or mec)");
}

VoteOutcome majority_vote_predict(CompletionClient& client, const std::string& model_id,
                                  const MCQItem& item, int k, std::uint64_t seed,
                                  bool include_identity, const RunOptions& options) {
  if (k < 1) throw ConfigError("majority vote needs k >= 1");
  const int n = item.option_count();
  // Without-replacement sampling caps the useful k at n!.
  std::uint64_t capped = static_cast<std::uint64_t>(k);
  if (n <= 20) capped = std::min(capped, factorial(n));
  const std::vector<Ordering> orderings =
      sample_orderings(n, capped, seed, include_identity);

  VoteOutcome outcome;
  std::vector<std::optional<int>> votes(orderings.size());
  for (size_t s = 0; s < orderings.size(); ++s) {
    const OrderedItem ordered = apply_ordering(item, orderings[s]);
    const auto prediction = query_choice(client, model_id, ordered, FewShotConfig{}, options);
    if (prediction) {
      votes[s] = prediction->canonical_index;
      ++outcome.tally[prediction->canonical_index];
    } else {
      votes[s] = std::nullopt;
      ++outcome.non_votes;
    }
  }
  if (outcome.tally.empty()) return outcome;  // every reorder was unparseable

  int best_count = 0;
  for (const auto& [index, count] : outcome.tally) best_count = std::max(best_count, count);
  std::vector<int> tied;
  for (const auto& [index, count] : outcome.tally) {
    if (count == best_count) tied.push_back(index);
  }
  // Tie-break chain: the first sampled ordering's prediction when it is
  // among the tied options, else the lowest tied canonical index (the map
  // is key-ordered, so tied.front() is the lowest).
  int winner = tied.front();
  if (tied.size() > 1 && votes.front().has_value() &&
      std::find(tied.begin(), tied.end(), *votes.front()) != tied.end()) {
    winner = *votes.front();
  }

  Prediction prediction;
  prediction.canonical_index = winner;
  // Display fields describe the winning option under the identity order,
  // since the vote aggregates across many orderings.
  prediction.display_position = winner;
  prediction.display_letter = letter_for(winner);
  prediction.rule = ParseRule::answer_line;
  outcome.prediction = prediction;
  return outcome;
}

MecOutcome mec_predict(CompletionClient& client, const std::string& model_id,
                       const MCQItem& item, const RunOptions& options) {
  const int n = item.option_count();
  const OrderedItem ordered = apply_ordering(item, Ordering::identity(n));
  ModelRequest request;
  request.model_id = model_id;
  request.prompt = render_mec_prompt(options.templates, ordered);
  request.max_tokens = options.mec_max_tokens;
  request.temperature = options.temperature;
  const ModelResponse response = client.complete(request);

  MecOutcome outcome;
  outcome.raw = response.text;
  const auto position = parse_final_answer_line(response.text, n);
  if (position) {
    Prediction prediction;
    prediction.display_position = *position;
    prediction.canonical_index = ordered.ordering.canonical_at(*position);
    prediction.display_letter = letter_for(*position);
    prediction.rule = ParseRule::answer_line;
    prediction.raw = response.text;
    outcome.prediction = prediction;
    // Everything before the final answer line is the explanation.
    const size_t cut = response.text.rfind("\n");
    outcome.explanation =
        cut == std::string::npos ? std::string() : response.text.substr(0, cut);
  } else {
    outcome.explanation = response.text;
  }
  return outcome;
}

CalibratedResult calibrated_evaluate(CompletionClient& client, const std::string& model_id,
                                     const Dataset& dataset, const CalibrationConfig& config,
                                     const RunOptions& options,
                                     std::optional<double> vanilla_override) {
  validate_dataset(dataset);
  if (config.k < 1) throw ConfigError("calibration k must be >= 1");
  const int total = static_cast<int>(dataset.items.size());

  CalibratedResult result;
  result.method = config.method;
  result.total = total;
  if (config.method == CalibrationMethod::majority_vote) {
    result.votes_per_item.assign(static_cast<size_t>(total), {});
  }

  std::vector<int> correct(static_cast<size_t>(total), 0);
  std::vector<int> abstained(static_cast<size_t>(total), 0);
  parallel_map(total, options.workers, [&](int i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    if (config.method == CalibrationMethod::majority_vote) {
      const VoteOutcome outcome = majority_vote_predict(
          client, model_id, item, config.k,
          item_seed(config.seed, static_cast<std::uint64_t>(i)), config.include_identity,
          options);
      result.votes_per_item[static_cast<size_t>(i)] = outcome.tally;
      if (!outcome.prediction) {
        abstained[static_cast<size_t>(i)] = 1;
      } else if (outcome.prediction->canonical_index == item.gold_index) {
        correct[static_cast<size_t>(i)] = 1;
      }
    } else {
      const MecOutcome outcome = mec_predict(client, model_id, item, options);
      if (!outcome.prediction) {
        abstained[static_cast<size_t>(i)] = 1;
      } else if (outcome.prediction->canonical_index == item.gold_index) {
        correct[static_cast<size_t>(i)] = 1;
      }
    }
  });
  for (int i = 0; i < total; ++i) {
    result.correct += correct[static_cast<size_t>(i)];
    result.abstentions += abstained[static_cast<size_t>(i)];
  }
  result.accuracy_pct =
      total == 0 ? 0.0 : 100.0 * static_cast<double>(result.correct) / total;

  if (vanilla_override) {
    result.vanilla_acc = *vanilla_override;
  } else {
    result.vanilla_acc =
        evaluate_vanilla(client, model_id, dataset, FewShotConfig{}, options).accuracy_pct;
  }
  result.delta_vs_vanilla = result.accuracy_pct - result.vanilla_acc;
  return result;
}

}  // namespace mcqorder
