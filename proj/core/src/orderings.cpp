// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/orderings.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <set>

namespace mcqorder {

OrderedItem apply_ordering(const MCQItem& item, const Ordering& ordering) {
  if (ordering.size() != item.option_count()) {
    throw LengthMismatch("ordering size " + std::to_string(ordering.size()) +
                         " does not match option count " + std::to_string(item.option_count()) +
                         " for item " + item.id);
  }
  return OrderedItem{item, ordering};
}

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw UnsupportedN("factorial undefined for n=" + std::to_string(n));
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

Budget Budget::parse(const std::string& text) {
  if (text == "exhaustive") return exhaustive();
  std::uint64_t value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || value == 0) {
    throw ConfigError("budget must be 'exhaustive' or a positive integer, got '" + text + "'");
  }
  return sampled(value);
}

std::string Budget::to_string() const {
  return is_exhaustive ? "exhaustive" : std::to_string(count);
}

std::vector<Ordering> enumerate_orderings(int n) {
  if (n < 1) throw UnsupportedN("cannot enumerate orderings for n=" + std::to_string(n));
  if (n > 6) throw ExhaustiveTooLarge(n);
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  std::vector<Ordering> out;
  out.reserve(factorial(n));
  do {
    out.emplace_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<Ordering> enumerate_orderings(int n, const Budget& budget, std::uint64_t seed) {
  if (budget.is_exhaustive) return enumerate_orderings(n);
  if (budget.count == 0) throw ConfigError("sampled budget must be positive");
  return sample_orderings(n, budget.count, seed, /*include_identity=*/true);
}

std::vector<Ordering> sample_orderings(int n, std::uint64_t count, std::uint64_t seed,
                                       bool include_identity) {
  if (n < 1) throw UnsupportedN("cannot sample orderings for n=" + std::to_string(n));
  const std::uint64_t total = n <= 20 ? factorial(n) : UINT64_MAX;
  count = std::min(count, total);
  if (count == 0) return {};
  std::mt19937_64 rng(seed);

  // Small n: enumerate everything and take a shuffled prefix. This keeps
  // sampling without replacement exact even when count is close to n!.
  if (n <= 8) {
    std::vector<std::vector<int>> all;
    all.reserve(total);
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    do {
      all.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Ordering> out;
    out.reserve(count);
    if (include_identity) {
      out.push_back(Ordering::identity(n));
      for (const auto& p : all) {
        if (out.size() >= count) break;
        Ordering o(p);
        if (o.is_identity()) continue;
        out.push_back(std::move(o));
      }
    } else {
      for (std::uint64_t i = 0; i < count; ++i) out.emplace_back(all[i]);
    }
    return out;
  }

  // Large n: n! dwarfs any practical count, so rejection sampling terminates
  // quickly.
  std::set<std::vector<int>> seen;
  std::vector<Ordering> out;
  out.reserve(count);
  if (include_identity) {
    out.push_back(Ordering::identity(n));
    std::vector<int> id(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) id[static_cast<size_t>(i)] = i;
    seen.insert(std::move(id));
  }
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  while (out.size() < count) {
    std::shuffle(perm.begin(), perm.end(), rng);
    if (seen.insert(perm).second) out.emplace_back(perm);
  }
  return out;
}

std::uint64_t item_seed(std::uint64_t run_seed, std::uint64_t item_index) {
  // splitmix64 over the combined value; stable across platforms.
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL * (item_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mcqorder
