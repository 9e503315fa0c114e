// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/sorting.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>

#include <nlohmann/json.hpp>

#include "mcqorder/parsers.hpp"

namespace mcqorder {

namespace {

double percent(int numerator, int denominator) {
  if (denominator == 0) return 0.0;
  return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

void validate_ranking(const std::vector<int>& ranking, int n, const std::string& item_id) {
  if (static_cast<int>(ranking.size()) != n) {
    throw LengthMismatch("ranking for " + item_id + " has " +
                         std::to_string(ranking.size()) + " entries, item has " +
                         std::to_string(n) + " options");
  }
  std::set<int> seen;
  for (const int index : ranking) {
    if (index < 0 || index >= n || !seen.insert(index).second) {
      throw LengthMismatch("ranking for " + item_id + " is not a permutation of 0.." +
                           std::to_string(n - 1));
    }
  }
}

}  // namespace

RankingMap to_ranking_map(const std::vector<RankingRecord>& rankings) {
  RankingMap map;
  for (const auto& record : rankings) map[record.item_id] = record;
  return map;
}

SortRun sort_all(CompletionClient& client, const std::string& model_id, const Dataset& dataset,
                 const RunOptions& options) {
  validate_dataset(dataset);
  const int total = static_cast<int>(dataset.items.size());
  std::vector<std::optional<RankingRecord>> results(static_cast<size_t>(total));
  parallel_map(total, options.workers, [&](int i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const int n = item.option_count();
    const OrderedItem ordered = apply_ordering(item, Ordering::identity(n));
    ModelRequest request;
    request.model_id = model_id;
    request.prompt = render_sort_prompt(options.templates, ordered);
    request.max_tokens = options.sort_max_tokens;
    request.temperature = options.temperature;
    const ModelResponse response = client.complete(request);
    const auto positions = parse_sort(response.text, n);
    if (!positions) return;
    RankingRecord record;
    record.item_id = item.id;
    record.source = model_id;
    record.ranking.reserve(positions->size());
    for (const int position : *positions) {
      record.ranking.push_back(ordered.ordering.canonical_at(position));
    }
    results[static_cast<size_t>(i)] = std::move(record);
  });
  SortRun run;
  for (int i = 0; i < total; ++i) {
    if (results[static_cast<size_t>(i)]) {
      run.rankings.push_back(std::move(*results[static_cast<size_t>(i)]));
    } else {
      ++run.parse_failures;
      run.failed_item_ids.push_back(dataset.items[static_cast<size_t>(i)].id);
    }
  }
  return run;
}

double hits_at_k(const RankingMap& rankings, const Dataset& dataset, int k) {
  if (k < 1) throw KOutOfRange("hits_at_k requires k >= 1");
  int covered = 0;
  int hits = 0;
  for (const auto& item : dataset.items) {
    const auto it = rankings.find(item.id);
    if (it == rankings.end()) continue;
    const int n = item.option_count();
    if (k > n) {
      throw KOutOfRange("k=" + std::to_string(k) + " exceeds option count " +
                        std::to_string(n) + " for item " + item.id);
    }
    validate_ranking(it->second.ranking, n, item.id);
    ++covered;
    const auto& ranking = it->second.ranking;
    if (std::find(ranking.begin(), ranking.begin() + k, item.gold_index) !=
        ranking.begin() + k) {
      ++hits;
    }
  }
  return percent(hits, covered);
}

ReducedItem reduce_top_k(const MCQItem& item, const std::vector<int>& ranking, int k) {
  const int n = item.option_count();
  if (k < 1 || k > n) {
    throw KOutOfRange("k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                      "] for item " + item.id);
  }
  validate_ranking(ranking, n, item.id);
  // Survivors keep their canonical order of appearance.
  std::vector<int> survivors(ranking.begin(), ranking.begin() + k);
  std::sort(survivors.begin(), survivors.end());
  ReducedItem reduced;
  reduced.item.id = item.id;
  reduced.item.question = item.question;
  reduced.item.metadata = item.metadata;
  reduced.item.gold_index = 0;
  reduced.gold_dropped = true;
  for (size_t i = 0; i < survivors.size(); ++i) {
    reduced.item.options.push_back(item.options[static_cast<size_t>(survivors[i])]);
    if (survivors[i] == item.gold_index) {
      reduced.item.gold_index = static_cast<int>(i);
      reduced.gold_dropped = false;
    }
  }
  return reduced;
}

EvalOutcome evaluate_reduced(CompletionClient& client, const std::string& model_id,
                             const Dataset& dataset, const RankingMap& rankings, int k,
                             const RunOptions& options) {
  validate_dataset(dataset);
  const int total = static_cast<int>(dataset.items.size());
  std::vector<ReducedItem> reduced(static_cast<size_t>(total));
  for (int i = 0; i < total; ++i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const auto it = rankings.find(item.id);
    if (it == rankings.end()) throw MissingRanking(item.id);
    reduced[static_cast<size_t>(i)] = reduce_top_k(item, it->second.ranking, k);
  }
  std::vector<int> correct(static_cast<size_t>(total), 0);
  std::vector<int> abstained(static_cast<size_t>(total), 0);
  parallel_map(total, options.workers, [&](int i) {
    const ReducedItem& entry = reduced[static_cast<size_t>(i)];
    const int n = entry.item.option_count();
    // A 1-option item cannot be prompted; it is scored by construction
    // (gold kept: trivially correct; gold dropped: incorrect).
    if (n < kMinOptions) {
      if (!entry.gold_dropped) correct[static_cast<size_t>(i)] = 1;
      return;
    }
    const OrderedItem ordered = apply_ordering(entry.item, Ordering::identity(n));
    const auto prediction =
        query_choice(client, model_id, ordered, FewShotConfig{}, options);
    if (!prediction) {
      abstained[static_cast<size_t>(i)] = 1;
      return;
    }
    if (!entry.gold_dropped && prediction->canonical_index == entry.item.gold_index) {
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

HitsReport hits_report(CompletionClient& client, const std::string& model_id,
                       const Dataset& dataset, const RunOptions& options) {
  const SortRun run = sort_all(client, model_id, dataset, options);
  const RankingMap map = to_ranking_map(run.rankings);
  int min_n = kMaxOptions;
  for (const auto& item : dataset.items) min_n = std::min(min_n, item.option_count());

  HitsReport report;
  report.parse_failures = run.parse_failures;
  report.ranked_items = static_cast<int>(run.rankings.size());
  for (int k = 1; k <= std::min(3, min_n); ++k) {
    report.hits_at[k] = hits_at_k(map, dataset, k);
  }
  report.full_acc =
      evaluate_vanilla(client, model_id, dataset, FewShotConfig{}, options).accuracy_pct;
  if (run.parse_failures == 0) {
    for (int k = 2; k <= std::min(3, min_n); ++k) {
      report.reduced_acc[k] =
          evaluate_reduced(client, model_id, dataset, map, k, options).accuracy_pct;
    }
  }
  return report;
}

void save_rankings(const std::vector<RankingRecord>& rankings,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open rankings file for writing: " + path.string());
  for (const auto& record : rankings) {
    nlohmann::ordered_json j;
    j["item_id"] = record.item_id;
    j["ranking"] = record.ranking;
    j["source"] = record.source;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing rankings to: " + path.string());
}

std::vector<RankingRecord> load_rankings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rankings file: " + path.string());
  std::vector<RankingRecord> rankings;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedRecord(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("item_id") || !j.contains("ranking")) {
      throw MalformedRecord(line_no, "ranking record needs item_id and ranking");
    }
    RankingRecord record;
    record.item_id = j["item_id"].get<std::string>();
    record.ranking = j["ranking"].get<std::vector<int>>();
    if (j.contains("source")) record.source = j["source"].get<std::string>();
    rankings.push_back(std::move(record));
  }
  return rankings;
}

}  // namespace mcqorder
