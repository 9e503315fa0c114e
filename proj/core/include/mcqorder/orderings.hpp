// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcqorder/types.hpp"

namespace mcqorder {

/// Pairs an item with a display order. Throws LengthMismatch if sizes differ.
OrderedItem apply_ordering(const MCQItem& item, const Ordering& ordering);

/// n! for n <= 20.
std::uint64_t factorial(int n);

/// Ordering budget for min/max searches: either exhaustive or a sampled count.
struct Budget {
  bool is_exhaustive = true;
  std::uint64_t count = 0;  // meaningful when !is_exhaustive

  static Budget exhaustive() { return Budget{true, 0}; }
  static Budget sampled(std::uint64_t count) { return Budget{false, count}; }
  /// Accepts "exhaustive" or a positive integer.
  static Budget parse(const std::string& text);
  std::string to_string() const;
};

/// Every ordering of n options in lexicographic order, identity first.
/// Throws ExhaustiveTooLarge for n > 6 and UnsupportedN for n < 1.
std::vector<Ordering> enumerate_orderings(int n);

/// Orderings to evaluate under a budget. Exhaustive budgets delegate to
/// enumerate_orderings. Sampled budgets return min(count, n!) distinct
/// orderings with the identity first; the remainder is a deterministic
/// function of the seed. A sampled count of 0 is a ConfigError.
std::vector<Ordering> enumerate_orderings(int n, const Budget& budget, std::uint64_t seed);

/// `count` distinct orderings, deterministic in seed. If include_identity,
/// the identity is forced into (the front of) the result. count is clamped
/// to n!.
std::vector<Ordering> sample_orderings(int n, std::uint64_t count, std::uint64_t seed,
                                       bool include_identity);

/// Stable per-item seed derived from a run seed and the item's index.
std::uint64_t item_seed(std::uint64_t run_seed, std::uint64_t item_index);

}  // namespace mcqorder
