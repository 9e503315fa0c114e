// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mcqorder/eval.hpp"
#include "mcqorder/sensitivity.hpp"
#include "mcqorder/types.hpp"

namespace mcqorder {

/// One model-produced option ranking, most to least probable, in canonical
/// indices.
struct RankingRecord {
  std::string item_id;
  std::vector<int> ranking;
  std::string source;  // model id that produced it
};

struct SortRun {
  std::vector<RankingRecord> rankings;
  int parse_failures = 0;
  std::vector<std::string> failed_item_ids;
};

using RankingMap = std::map<std::string, RankingRecord>;

RankingMap to_ranking_map(const std::vector<RankingRecord>& rankings);

/// Asks the model to sort each item's options (identity display order);
/// unparseable replies are recorded and excluded.
SortRun sort_all(CompletionClient& client, const std::string& model_id, const Dataset& dataset,
                 const RunOptions& options);

/// % of ranked items whose gold index appears in the first k entries.
/// Items without a ranking are excluded from the denominator. Throws
/// KOutOfRange when k < 1 or k exceeds a covered item's option count.
double hits_at_k(const RankingMap& rankings, const Dataset& dataset, int k);

/// reduce_top_k output: the reduced item, plus whether the gold option was
/// dropped. When gold_dropped is true the reduced item's gold_index is a
/// placeholder (0) and any prediction on it scores incorrect.
struct ReducedItem {
  MCQItem item;
  bool gold_dropped = false;
};

/// Keeps the k top-ranked options, re-ordered to their canonical order of
/// appearance, and remaps gold_index. Throws KOutOfRange unless
/// 1 <= k <= n; throws LengthMismatch when ranking is not a permutation of
/// the item's indices.
ReducedItem reduce_top_k(const MCQItem& item, const std::vector<int>& ranking, int k);

/// Accuracy over the dataset after top-k reduction, identity display order,
/// shared denominator (gold-dropped items count incorrect). Throws
/// MissingRanking for uncovered items.
EvalOutcome evaluate_reduced(CompletionClient& client, const std::string& model_id,
                             const Dataset& dataset, const RankingMap& rankings, int k,
                             const RunOptions& options);

struct HitsReport {
  std::map<int, double> hits_at;      // k in {1,2,3} (clamped to min n)
  std::map<int, double> reduced_acc;  // k in {2,3} (clamped to min n)
  double full_acc = 0.0;
  int parse_failures = 0;
  int ranked_items = 0;
};

/// Sorts, scores Hits@k, and evaluates top-k reductions in one pass.
HitsReport hits_report(CompletionClient& client, const std::string& model_id,
                       const Dataset& dataset, const RunOptions& options);

/// JSONL persistence: one {item_id, ranking, source} object per line.
void save_rankings(const std::vector<RankingRecord>& rankings,
                   const std::filesystem::path& path);
std::vector<RankingRecord> load_rankings(const std::filesystem::path& path);

}  // namespace mcqorder
