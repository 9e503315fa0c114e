// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace mcqorder {

namespace {

const std::regex& answer_line_regex() {
  static const std::regex re(
      R"(^\s*answer\s*:\s*[\(\[]?([A-Za-z])(?:[\)\]\.,:;].*)?\s*$)",
      std::regex::icase | std::regex::optimize);
  return re;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (const char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  lines.push_back(current);
  return lines;
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower_copy(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Rule 1: scan lines from the bottom for an answer line with an in-range
/// letter.
std::optional<int> rule_answer_line(const std::string& text, int n) {
  const std::vector<std::string> lines = split_lines(text);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::smatch match;
    if (!std::regex_match(*it, match, answer_line_regex())) continue;
    const int position = position_for(match[1].str()[0]);
    if (position >= 0 && position < n) return position;
  }
  return std::nullopt;
}

/// Rule 2: standalone letter tokens. Uppercase letters count on their own;
/// lowercase letters only when wrapped "(a)" or suffixed "b." / "b)" / "b:",
/// which keeps bare articles out.
std::optional<int> rule_standalone_letter(const std::string& text, int n) {
  std::set<int> positions;
  const size_t size = text.size();
  for (size_t i = 0; i < size; ++i) {
    const char c = text[i];
    if (std::isalpha(static_cast<unsigned char>(c)) == 0) continue;
    const bool left_free = i == 0 || !is_alnum(text[i - 1]);
    const bool right_free = i + 1 == size || !is_alnum(text[i + 1]);
    if (!left_free || !right_free) continue;
    const char prev = i > 0 ? text[i - 1] : '\0';
    const char next = i + 1 < size ? text[i + 1] : '\0';
    const bool wrapped = (prev == '(' && next == ')') || (prev == '[' && next == ']');
    const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    const bool suffixed = next == ')' || next == '.' || next == ':';
    if (!wrapped && !upper && !suffixed) continue;
    const int position = position_for(c);
    if (position >= 0 && position < n) positions.insert(position);
  }
  if (positions.size() == 1) return *positions.begin();
  return std::nullopt;
}

/// Rule 3: unique containment of one displayed option's text.
std::optional<int> rule_option_text(const std::string& text,
                                    const std::vector<std::string>& displayed_options) {
  const std::string haystack = lower_copy(text);
  std::vector<int> hits;
  for (size_t p = 0; p < displayed_options.size(); ++p) {
    if (haystack.find(lower_copy(displayed_options[p])) != std::string::npos) {
      hits.push_back(static_cast<int>(p));
    }
  }
  if (hits.size() == 1) return hits.front();
  return std::nullopt;
}

}  // namespace

std::string to_string(ParseRule rule) {
  switch (rule) {
    case ParseRule::answer_line:
      return "answer_line";
    case ParseRule::standalone_letter:
      return "standalone_letter";
    case ParseRule::option_text:
      return "option_text";
  }
  throw Error("unknown parse rule");
}

std::optional<ChoiceParse> parse_choice(const std::string& text, int n,
                                        const std::vector<std::string>* displayed_options) {
  if (n < kMinOptions || n > kMaxOptions) {
    throw UnsupportedN("parse_choice requires n in [2, 26], got " + std::to_string(n));
  }
  if (displayed_options != nullptr &&
      static_cast<int>(displayed_options->size()) != n) {
    throw LengthMismatch("displayed_options size does not match n");
  }
  if (auto position = rule_answer_line(text, n)) {
    return ChoiceParse{*position, ParseRule::answer_line};
  }
  if (auto position = rule_standalone_letter(text, n)) {
    return ChoiceParse{*position, ParseRule::standalone_letter};
  }
  if (displayed_options != nullptr) {
    if (auto position = rule_option_text(text, *displayed_options)) {
      return ChoiceParse{*position, ParseRule::option_text};
    }
  }
  return std::nullopt;
}

std::optional<int> parse_final_answer_line(const std::string& text, int n) {
  if (n < kMinOptions || n > kMaxOptions) {
    throw UnsupportedN("parse_final_answer_line requires n in [2, 26], got " +
                       std::to_string(n));
  }
  return rule_answer_line(text, n);
}

std::optional<std::vector<int>> parse_sort(const std::string& text, int n) {
  if (n < kMinOptions || n > kMaxOptions) {
    throw UnsupportedN("parse_sort requires n in [2, 26], got " + std::to_string(n));
  }
  std::vector<int> ranking;
  const size_t size = text.size();
  for (size_t i = 0; i < size; ++i) {
    const char c = text[i];
    if (std::isupper(static_cast<unsigned char>(c)) == 0) continue;
    const bool left_free = i == 0 || !is_alnum(text[i - 1]);
    const bool right_free = i + 1 == size || !is_alnum(text[i + 1]);
    if (!left_free || !right_free) continue;
    ranking.push_back(position_for(c));
  }
  if (static_cast<int>(ranking.size()) != n) return std::nullopt;
  std::set<int> seen;
  for (const int position : ranking) {
    if (position < 0 || position >= n) return std::nullopt;
    if (!seen.insert(position).second) return std::nullopt;
  }
  return ranking;
}

std::optional<std::vector<int>> parse_sort(const std::string& text,
                                           const OrderedItem& ordered) {
  const auto positions = parse_sort(text, ordered.size());
  if (!positions) return std::nullopt;
  std::vector<int> canonical;
  canonical.reserve(positions->size());
  for (const int position : *positions) {
    canonical.push_back(ordered.ordering.canonical_at(position));
  }
  return canonical;
}

std::optional<bool> parse_yes_no(const std::string& text) {
  const std::string haystack = lower_copy(text);
  auto word_at = [&](size_t i, const std::string& word) {
    if (haystack.compare(i, word.size(), word) != 0) return false;
    const bool left_free = i == 0 || !is_alnum(haystack[i - 1]);
    const size_t end = i + word.size();
    const bool right_free = end >= haystack.size() || !is_alnum(haystack[end]);
    return left_free && right_free;
  };
  for (size_t i = 0; i < haystack.size(); ++i) {
    if (word_at(i, "yes")) return true;
    if (word_at(i, "no")) return false;
  }
  return std::nullopt;
}

std::optional<Prediction> make_prediction(const std::string& text, const OrderedItem& ordered) {
  const std::vector<std::string> displayed = ordered.displayed_options();
  const auto parsed = parse_choice(text, ordered.size(), &displayed);
  if (!parsed) return std::nullopt;
  Prediction prediction;
  prediction.display_position = parsed->position;
  prediction.canonical_index = ordered.ordering.canonical_at(parsed->position);
  prediction.display_letter = letter_for(parsed->position);
  prediction.rule = parsed->rule;
  prediction.raw = text;
  return prediction;
}

}  // namespace mcqorder
