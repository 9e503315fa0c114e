// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace mcqorder {

namespace {

double percent(int numerator, int denominator) {
  if (denominator == 0) return 0.0;
  return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

std::string to_string(Relation relation) {
  return relation == Relation::top1_earlier ? "top1_earlier" : "top1_later";
}

std::string to_string(GapPref pref) {
  return pref == GapPref::min_gap ? "min_gap" : "max_gap";
}

std::string to_string(ModelFamily family) {
  return family == ModelFamily::gpt4_like ? "gpt4-like" : "instruct-like";
}

std::string to_string(PatternGoal goal) {
  return goal == PatternGoal::amplify ? "amplify" : "mitigate";
}

PatternSpec PatternSpec::by_id(int id) {
  if (id < 1 || id > 4) throw ConfigError("pattern id must be 1..4, got " + std::to_string(id));
  PatternSpec spec;
  spec.id = id;
  spec.relation = id <= 2 ? Relation::top1_earlier : Relation::top1_later;
  spec.gap_pref = (id == 1 || id == 3) ? GapPref::min_gap : GapPref::max_gap;
  return spec;
}

PatternSpec PatternSpec::from(Relation relation, GapPref gap_pref) {
  const int base = relation == Relation::top1_earlier ? 1 : 3;
  return by_id(base + (gap_pref == GapPref::max_gap ? 1 : 0));
}

std::string PlacementSpec::label() const {
  std::string out;
  out += letter_for(pos_top1);
  out += letter_for(pos_top2);
  return out;
}

PlacementSpec PlacementSpec::from_text(const std::string& text, int n) {
  if (n < kMinOptions || n > kMaxOptions) {
    throw UnsupportedN("placement needs n in [2, 26], got " + std::to_string(n));
  }
  PlacementSpec placement;
  placement.n = n;
  if (text.size() == 2 && std::isalpha(static_cast<unsigned char>(text[0])) != 0 &&
      std::isalpha(static_cast<unsigned char>(text[1])) != 0) {
    placement.pos_top1 = position_for(text[0]);
    placement.pos_top2 = position_for(text[1]);
  } else {
    const size_t comma = text.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("placement must be two letters (\"AE\") or \"pos1,pos2\", got '" +
                        text + "'");
    }
    try {
      placement.pos_top1 = std::stoi(text.substr(0, comma));
      placement.pos_top2 = std::stoi(text.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse placement positions from '" + text + "'");
    }
  }
  if (placement.pos_top1 == placement.pos_top2) {
    throw EqualPositions("placement positions must differ");
  }
  if (placement.pos_top1 < 0 || placement.pos_top2 < 0 || placement.pos_top1 >= n ||
      placement.pos_top2 >= n) {
    throw PositionOutOfRange("placement '" + text + "' outside option count " +
                             std::to_string(n));
  }
  return placement;
}

LayoutClass classify_layout(int pos_top1, int pos_top2) {
  if (pos_top1 == pos_top2) throw EqualPositions("top-2 positions are equal");
  if (pos_top1 < 0 || pos_top2 < 0) throw PositionOutOfRange("negative display position");
  LayoutClass layout{};
  layout.relation = pos_top1 < pos_top2 ? Relation::top1_earlier : Relation::top1_later;
  layout.gap = std::abs(pos_top1 - pos_top2) - 1;
  return layout;
}

std::vector<PlacementSpec> enumerate_instantiations(const PatternSpec& pattern, int n) {
  if (n < kMinOptions) throw UnsupportedN("need at least 2 options");
  std::vector<PlacementSpec> placements;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      if (classify_layout(a, b).relation != pattern.relation) continue;
      PlacementSpec placement;
      placement.pos_top1 = a;
      placement.pos_top2 = b;
      placement.n = n;
      placements.push_back(placement);
    }
  }
  const bool ascending = pattern.gap_pref == GapPref::min_gap;
  std::stable_sort(placements.begin(), placements.end(),
                   [&](const PlacementSpec& x, const PlacementSpec& y) {
                     const int gx = classify_layout(x.pos_top1, x.pos_top2).gap;
                     const int gy = classify_layout(y.pos_top1, y.pos_top2).gap;
                     if (gx != gy) return ascending ? gx < gy : gx > gy;
                     return x.pos_top1 < y.pos_top1;
                   });
  return placements;
}

PresetEntry preset_placements(ModelFamily family, int n, PatternGoal goal) {
  if (n < 3 || n > 5) {
    throw UnsupportedN("presets cover 3 to 5 options, got " + std::to_string(n));
  }
  struct Row {
    ModelFamily family;
    int n;
    PatternGoal goal;
    int pattern_id;
    int pos_top1;
    int pos_top2;
  };
  // Best placements measured per family, option count, and goal. The
  // instruct-like 4-option amplify row names position E (index 4), which a
  // 4-option item does not have; it is kept verbatim and flagged.
  static const Row kRows[] = {
      {ModelFamily::gpt4_like, 5, PatternGoal::amplify, 2, 0, 4},      // AE
      {ModelFamily::gpt4_like, 5, PatternGoal::mitigate, 3, 1, 0},     // BA
      {ModelFamily::gpt4_like, 4, PatternGoal::amplify, 2, 1, 3},      // BD
      {ModelFamily::gpt4_like, 4, PatternGoal::mitigate, 1, 0, 1},     // AB
      {ModelFamily::gpt4_like, 3, PatternGoal::amplify, 2, 0, 2},      // AC
      {ModelFamily::gpt4_like, 3, PatternGoal::mitigate, 3, 2, 1},     // CB
      {ModelFamily::instruct_like, 5, PatternGoal::amplify, 4, 4, 0},  // EA
      {ModelFamily::instruct_like, 5, PatternGoal::mitigate, 1, 1, 2}, // BC
      {ModelFamily::instruct_like, 4, PatternGoal::amplify, 4, 4, 0},  // EA (out of range)
      {ModelFamily::instruct_like, 4, PatternGoal::mitigate, 3, 2, 1}, // CB
      {ModelFamily::instruct_like, 3, PatternGoal::amplify, 4, 2, 0},  // CA
      {ModelFamily::instruct_like, 3, PatternGoal::mitigate, 3, 2, 1}, // CB
  };
  for (const Row& row : kRows) {
    if (row.family != family || row.n != n || row.goal != goal) continue;
    PresetEntry entry;
    entry.pattern = PatternSpec::by_id(row.pattern_id);
    entry.placement.pos_top1 = row.pos_top1;
    entry.placement.pos_top2 = row.pos_top2;
    entry.placement.n = n;
    entry.position_out_of_range = row.pos_top1 >= n || row.pos_top2 >= n;
    return entry;
  }
  throw ConfigError("no preset for this family/n/goal combination");
}

OrderedItem apply_top2_placement(const MCQItem& item, const TopPair& pair,
                                 const PlacementSpec& placement) {
  const int n = item.option_count();
  if (pair.top1 == pair.top2) throw EqualPositions("top-2 pair indices are equal");
  if (pair.top1 < 0 || pair.top1 >= n || pair.top2 < 0 || pair.top2 >= n) {
    throw PositionOutOfRange("top-2 pair outside option range for item " + item.id);
  }
  if (placement.pos_top1 == placement.pos_top2) {
    throw EqualPositions("placement positions are equal");
  }
  if (placement.pos_top1 < 0 || placement.pos_top1 >= n || placement.pos_top2 < 0 ||
      placement.pos_top2 >= n) {
    throw PositionOutOfRange("placement " + placement.label() + " outside option count " +
                             std::to_string(n));
  }
  std::vector<int> perm(static_cast<size_t>(n), -1);
  perm[static_cast<size_t>(placement.pos_top1)] = pair.top1;
  perm[static_cast<size_t>(placement.pos_top2)] = pair.top2;
  int next_canonical = 0;
  for (int p = 0; p < n; ++p) {
    if (perm[static_cast<size_t>(p)] != -1) continue;
    while (next_canonical == pair.top1 || next_canonical == pair.top2) ++next_canonical;
    perm[static_cast<size_t>(p)] = next_canonical++;
  }
  return apply_ordering(item, Ordering(perm));
}

TopPair top_pair_for(const MCQItem& item, const RankingRecord& ranking, bool use_model_top1) {
  const int n = item.option_count();
  if (static_cast<int>(ranking.ranking.size()) != n) {
    throw LengthMismatch("ranking for " + item.id + " does not cover all options");
  }
  TopPair pair;
  pair.top1 = use_model_top1 ? ranking.ranking.front() : item.gold_index;
  pair.top2 = -1;
  for (const int index : ranking.ranking) {
    if (index != pair.top1) {
      pair.top2 = index;
      break;
    }
  }
  if (pair.top2 < 0) throw LengthMismatch("ranking for " + item.id + " has no second option");
  return pair;
}

namespace {

struct PlacementAccuracy {
  int correct = 0;
  int abstained = 0;
};

PlacementAccuracy accuracy_under_placement(CompletionClient& client,
                                           const std::string& model_id,
                                           const Dataset& dataset, const RankingMap& rankings,
                                           const PlacementSpec& placement,
                                           const RunOptions& options, bool use_model_top1) {
  const int total = static_cast<int>(dataset.items.size());
  std::vector<int> correct(static_cast<size_t>(total), 0);
  std::vector<int> abstained(static_cast<size_t>(total), 0);
  // The ranking lookup happens before the parallel region so missing
  // rankings surface deterministically.
  std::vector<TopPair> pairs(static_cast<size_t>(total));
  for (int i = 0; i < total; ++i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const auto it = rankings.find(item.id);
    if (it == rankings.end()) throw MissingRanking(item.id);
    pairs[static_cast<size_t>(i)] = top_pair_for(item, it->second, use_model_top1);
  }
  parallel_map(total, options.workers, [&](int i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const OrderedItem ordered =
        apply_top2_placement(item, pairs[static_cast<size_t>(i)], placement);
    const auto prediction = query_choice(client, model_id, ordered, FewShotConfig{}, options);
    if (!prediction) {
      abstained[static_cast<size_t>(i)] = 1;
    } else if (prediction->canonical_index == item.gold_index) {
      correct[static_cast<size_t>(i)] = 1;
    }
  });
  PlacementAccuracy result;
  for (int i = 0; i < total; ++i) {
    result.correct += correct[static_cast<size_t>(i)];
    result.abstained += abstained[static_cast<size_t>(i)];
  }
  return result;
}

const SensitivityReport& require_gap_report(const SensitivityReport* gap_report) {
  if (gap_report == nullptr) {
    throw MissingGapReport("pattern experiments need a sensitivity report for the original gap");
  }
  if (gap_report->gap <= 0.0) {
    throw MissingGapReport("sensitivity report has a non-positive gap; coverage is undefined");
  }
  return *gap_report;
}

}  // namespace

CoverageResult amplify_experiment(CompletionClient& client, const std::string& model_id,
                                  const Dataset& dataset, const RankingMap& rankings,
                                  const PlacementSpec& placement,
                                  const SensitivityReport* gap_report,
                                  const RunOptions& options,
                                  const PatternRunOptions& pattern_options) {
  validate_dataset(dataset);
  const SensitivityReport& gaps = require_gap_report(gap_report);
  const int total = static_cast<int>(dataset.items.size());

  const PlacementAccuracy forward =
      accuracy_under_placement(client, model_id, dataset, rankings, placement, options,
                               pattern_options.use_model_top1);
  PlacementSpec reversed = placement;
  std::swap(reversed.pos_top1, reversed.pos_top2);
  const PlacementAccuracy backward =
      accuracy_under_placement(client, model_id, dataset, rankings, reversed, options,
                               pattern_options.use_model_top1);

  CoverageResult result;
  result.goal = PatternGoal::amplify;
  result.task_id = dataset.task_id;
  result.model_id = model_id;
  result.placement = placement;
  result.items = total;
  result.vanilla_acc = gaps.vanilla_acc;
  result.original_gap = gaps.gap;
  result.acc_placement = percent(forward.correct, total);
  result.acc_reverse = percent(backward.correct, total);
  result.delta_max = result.acc_placement - result.vanilla_acc;
  result.delta_min = result.acc_reverse - result.vanilla_acc;
  result.coverage_pct = (result.delta_max - result.delta_min) / result.original_gap * 100.0;
  return result;
}

CoverageResult mitigate_experiment(CompletionClient& client, const std::string& model_id,
                                   const Dataset& dataset, const RankingMap& rankings,
                                   const PlacementSpec& placement, const Budget& budget,
                                   std::uint64_t seed, const SensitivityReport* gap_report,
                                   const RunOptions& options,
                                   const PatternRunOptions& pattern_options) {
  validate_dataset(dataset);
  const SensitivityReport& gaps = require_gap_report(gap_report);
  const int total = static_cast<int>(dataset.items.size());

  std::vector<TopPair> pairs(static_cast<size_t>(total));
  for (int i = 0; i < total; ++i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const auto it = rankings.find(item.id);
    if (it == rankings.end()) throw MissingRanking(item.id);
    pairs[static_cast<size_t>(i)] = top_pair_for(item, it->second,
                                                 pattern_options.use_model_top1);
  }

  std::vector<int> exists(static_cast<size_t>(total), 0);
  std::vector<int> always(static_cast<size_t>(total), 0);
  parallel_map(total, options.workers, [&](int i) {
    const MCQItem& item = dataset.items[static_cast<size_t>(i)];
    const TopPair& pair = pairs[static_cast<size_t>(i)];
    const int n = item.option_count();
    if (placement.pos_top1 >= n || placement.pos_top2 >= n) {
      throw PositionOutOfRange("placement " + placement.label() + " outside option count " +
                               std::to_string(n) + " for item " + item.id);
    }
    // Free slots host every option except the pinned pair, kept in
    // canonical order before permuting.
    std::vector<int> free_positions;
    std::vector<int> free_canonicals;
    for (int p = 0; p < n; ++p) {
      if (p != placement.pos_top1 && p != placement.pos_top2) free_positions.push_back(p);
    }
    for (int c = 0; c < n; ++c) {
      if (c != pair.top1 && c != pair.top2) free_canonicals.push_back(c);
    }
    const int free_count = static_cast<int>(free_positions.size());

    std::vector<Ordering> arrangements;
    if (free_count == 0) {
      arrangements.push_back(Ordering::identity(1));  // placeholder; one fixed layout
    } else {
      const std::uint64_t free_total = factorial(free_count);
      const bool exhaustive =
          budget.is_exhaustive || (free_count <= 6 && budget.count >= free_total);
      if (exhaustive) {
        arrangements = enumerate_orderings(free_count);
      } else {
        arrangements = sample_orderings(free_count, budget.count,
                                        item_seed(seed, static_cast<std::uint64_t>(i)),
                                        /*include_identity=*/true);
      }
    }

    bool any_correct = false;
    bool all_correct = true;
    for (const Ordering& arrangement : arrangements) {
      std::vector<int> perm(static_cast<size_t>(n), -1);
      perm[static_cast<size_t>(placement.pos_top1)] = pair.top1;
      perm[static_cast<size_t>(placement.pos_top2)] = pair.top2;
      for (int f = 0; f < free_count; ++f) {
        perm[static_cast<size_t>(free_positions[static_cast<size_t>(f)])] =
            free_canonicals[static_cast<size_t>(arrangement.canonical_at(f))];
      }
      const OrderedItem ordered = apply_ordering(item, Ordering(perm));
      const auto prediction = query_choice(client, model_id, ordered, FewShotConfig{}, options);
      const bool correct = prediction && prediction->canonical_index == item.gold_index;
      any_correct = any_correct || correct;
      all_correct = all_correct && correct;
    }
    exists[static_cast<size_t>(i)] = any_correct ? 1 : 0;
    always[static_cast<size_t>(i)] = all_correct ? 1 : 0;
  });

  int exists_total = 0;
  int always_total = 0;
  for (int i = 0; i < total; ++i) {
    exists_total += exists[static_cast<size_t>(i)];
    always_total += always[static_cast<size_t>(i)];
  }

  CoverageResult result;
  result.goal = PatternGoal::mitigate;
  result.task_id = dataset.task_id;
  result.model_id = model_id;
  result.placement = placement;
  result.items = total;
  result.vanilla_acc = gaps.vanilla_acc;
  result.original_gap = gaps.gap;
  result.acc_placement = percent(exists_total, total);  // max over arrangements
  result.acc_reverse = percent(always_total, total);    // min over arrangements
  result.delta_max = result.acc_placement - result.vanilla_acc;
  result.delta_min = result.acc_reverse - result.vanilla_acc;
  result.coverage_pct = (result.delta_max - result.delta_min) / result.original_gap * 100.0;
  return result;
}

}  // namespace mcqorder
