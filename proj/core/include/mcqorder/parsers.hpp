// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcqorder/types.hpp"

namespace mcqorder {

/// Which rule produced a parsed choice. Rules are tried in this order:
///   1. a dedicated answer line ("Answer: C"), scanned from the last line up;
///   2. a standalone letter token ("(B)", "b.", a lone "E");
///   3. unique containment of one displayed option's text.
enum class ParseRule { answer_line = 1, standalone_letter = 2, option_text = 3 };

std::string to_string(ParseRule rule);

struct ChoiceParse {
  int position = -1;  // display position, 0-based
  ParseRule rule = ParseRule::answer_line;
};

/// Extracts a single choice from free-form completion text. Out-of-range
/// letters are skipped; ambiguous candidates within a rule fall through to
/// the next rule. Rule 3 runs only when displayed_options is provided.
/// Returns nullopt when no rule yields a unique in-range choice.
std::optional<ChoiceParse> parse_choice(const std::string& text, int n,
                                        const std::vector<std::string>* displayed_options =
                                            nullptr);

/// Strict variant for explanation-first prompts: only the answer-line rule
/// applies (the explanation body is full of incidental letters).
std::optional<int> parse_final_answer_line(const std::string& text, int n);

/// Parses a ranking of all n display letters, most probable first.
/// Returns display positions. Requires exactly n distinct in-range letters.
std::optional<std::vector<int>> parse_sort(const std::string& text, int n);

/// Same, mapped through the item's display ordering to canonical indices.
std::optional<std::vector<int>> parse_sort(const std::string& text, const OrderedItem& ordered);

/// First word-boundary "yes" or "no" in the text, case-insensitive.
std::optional<bool> parse_yes_no(const std::string& text);

/// A parsed choice mapped back through the display ordering.
struct Prediction {
  int canonical_index = -1;
  int display_position = -1;
  char display_letter = '?';
  ParseRule rule = ParseRule::answer_line;
  std::string raw;
};

std::optional<Prediction> make_prediction(const std::string& text, const OrderedItem& ordered);

}  // namespace mcqorder
