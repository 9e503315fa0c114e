// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcqorder/eval.hpp"
#include "mcqorder/orderings.hpp"
#include "mcqorder/sensitivity.hpp"
#include "mcqorder/sorting.hpp"
#include "mcqorder/types.hpp"

namespace mcqorder {

/// Whether the model's top-1 choice is displayed before or after its top-2.
enum class Relation { top1_earlier, top1_later };

/// Whether a pattern prefers the smallest or the largest number of other
/// options between the top-2 choices.
enum class GapPref { min_gap, max_gap };

std::string to_string(Relation relation);
std::string to_string(GapPref pref);

/// The four top-2 layout patterns:
///   1 = (earlier, min_gap), 2 = (earlier, max_gap),
///   3 = (later, min_gap),   4 = (later, max_gap).
struct PatternSpec {
  int id = 1;
  Relation relation = Relation::top1_earlier;
  GapPref gap_pref = GapPref::min_gap;

  static PatternSpec by_id(int id);
  static PatternSpec from(Relation relation, GapPref gap_pref);
};

/// Display positions for the top-2 choices. Positions may exceed n-1 only
/// for verbatim preset rows (see preset_placements); applying such a
/// placement throws PositionOutOfRange.
struct PlacementSpec {
  int pos_top1 = 0;
  int pos_top2 = 1;
  int n = 2;

  /// Letter form, e.g. (0,4) -> "AE".
  std::string label() const;
  /// Parses "AE" or "0,4" against an option count.
  static PlacementSpec from_text(const std::string& text, int n);
};

struct TopPair {
  int top1 = 0;  // canonical index; gold in amplify experiments
  int top2 = 1;  // canonical index of the best-ranked other option
};

struct LayoutClass {
  Relation relation;
  int gap;  // options strictly between the two positions
};

/// Relation from the sign of pos_top1 - pos_top2; gap = |diff| - 1.
/// Throws EqualPositions.
LayoutClass classify_layout(int pos_top1, int pos_top2);

/// All placements matching the pattern's relation, sorted by gap
/// (ascending for min_gap, descending for max_gap), ties by pos_top1.
std::vector<PlacementSpec> enumerate_instantiations(const PatternSpec& pattern, int n);

enum class ModelFamily { gpt4_like, instruct_like };
enum class PatternGoal { amplify, mitigate };

std::string to_string(ModelFamily family);
std::string to_string(PatternGoal goal);

/// One preset row: the pattern, its placement, and whether the placement
/// names a position beyond n-1 (one published 4-option row does; it is
/// kept verbatim and flagged rather than corrected).
struct PresetEntry {
  PatternSpec pattern;
  PlacementSpec placement;
  bool position_out_of_range = false;
};

/// The built-in best placement per (model family, option count, goal).
/// Throws UnsupportedN for n outside {3, 4, 5}.
PresetEntry preset_placements(ModelFamily family, int n, PatternGoal goal);

/// Ordering that puts top1/top2 at the placement's positions and fills the
/// remaining positions with the other options in canonical order.
OrderedItem apply_top2_placement(const MCQItem& item, const TopPair& pair,
                                 const PlacementSpec& placement);

/// The top-2 pair for an item: top1 = gold (or the ranking's head when
/// use_model_top1), top2 = best-ranked other option.
TopPair top_pair_for(const MCQItem& item, const RankingRecord& ranking, bool use_model_top1);

struct PatternRunOptions {
  bool use_model_top1 = false;  // adversarial: top1 := model's top choice
};

struct CoverageResult {
  PatternGoal goal = PatternGoal::amplify;
  std::string task_id;
  std::string model_id;
  PlacementSpec placement;
  int items = 0;
  double vanilla_acc = 0.0;   // from the supplied gap report
  double original_gap = 0.0;  // from the supplied gap report
  double acc_placement = 0.0;  // amplify: placement as given; mitigate: max
  double acc_reverse = 0.0;    // amplify: swapped placement; mitigate: min
  double delta_max = 0.0;
  double delta_min = 0.0;
  double coverage_pct = 0.0;  // (delta_max - delta_min) / original_gap * 100
};

/// Places top-2 at the placement and at its reverse, measuring both
/// accuracies against the gap report's vanilla. gap_report == nullptr is a
/// MissingGapReport; an item absent from rankings is a MissingRanking.
CoverageResult amplify_experiment(CompletionClient& client, const std::string& model_id,
                                  const Dataset& dataset, const RankingMap& rankings,
                                  const PlacementSpec& placement,
                                  const SensitivityReport* gap_report,
                                  const RunOptions& options,
                                  const PatternRunOptions& pattern_options = {});

/// Pins the top-2 pair at the placement and searches min/max accuracy over
/// orderings of the remaining options (exhaustive when (n-2)! fits the
/// budget, sampled otherwise). The residual gap over the original gap is
/// the coverage.
CoverageResult mitigate_experiment(CompletionClient& client, const std::string& model_id,
                                   const Dataset& dataset, const RankingMap& rankings,
                                   const PlacementSpec& placement, const Budget& budget,
                                   std::uint64_t seed, const SensitivityReport* gap_report,
                                   const RunOptions& options,
                                   const PatternRunOptions& pattern_options = {});

}  // namespace mcqorder
