// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/types.hpp"

#include <algorithm>
#include <set>

namespace mcqorder {

char letter_for(int position) {
  if (position < 0 || position >= kMaxOptions) {
    throw PositionOutOfRange("position " + std::to_string(position) + " has no letter label");
  }
  return static_cast<char>('A' + position);
}

int position_for(char letter) {
  if (letter >= 'A' && letter <= 'Z') return letter - 'A';
  if (letter >= 'a' && letter <= 'z') return letter - 'a';
  return -1;
}

void validate_item(const MCQItem& item) {
  if (item.id.empty()) throw Error("item has empty id");
  const int n = item.option_count();
  if (n < kMinOptions || n > kMaxOptions) {
    throw Error("item " + item.id + ": option count " + std::to_string(n) +
                " outside [" + std::to_string(kMinOptions) + ", " + std::to_string(kMaxOptions) +
                "]");
  }
  std::set<std::string> seen;
  for (const auto& opt : item.options) {
    if (opt.empty()) throw Error("item " + item.id + ": empty option text");
    if (!seen.insert(opt).second) {
      throw Error("item " + item.id + ": duplicate option text: " + opt);
    }
  }
  if (item.gold_index < 0 || item.gold_index >= n) {
    throw Error("item " + item.id + ": gold index " + std::to_string(item.gold_index) +
                " outside option range");
  }
}

Ordering::Ordering(std::vector<int> perm) : perm_(std::move(perm)) {
  const int n = static_cast<int>(perm_.size());
  if (n < 1 || n > kMaxOptions) {
    throw Error("ordering size " + std::to_string(n) + " outside supported range");
  }
  inverse_.assign(perm_.size(), -1);
  for (int p = 0; p < n; ++p) {
    const int c = perm_[static_cast<size_t>(p)];
    if (c < 0 || c >= n) {
      throw Error("ordering entry " + std::to_string(c) + " outside [0, " + std::to_string(n) +
                  ")");
    }
    if (inverse_[static_cast<size_t>(c)] != -1) {
      throw Error("ordering repeats canonical index " + std::to_string(c));
    }
    inverse_[static_cast<size_t>(c)] = p;
  }
}

Ordering Ordering::identity(int n) {
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  return Ordering(std::move(perm));
}

Ordering Ordering::inverse() const {
  return Ordering(inverse_);
}

bool Ordering::is_identity() const {
  for (int p = 0; p < size(); ++p) {
    if (perm_[static_cast<size_t>(p)] != p) return false;
  }
  return true;
}

std::vector<std::string> OrderedItem::displayed_options() const {
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(size()));
  for (int p = 0; p < size(); ++p) out.push_back(option_at(p));
  return out;
}

std::optional<int> Dataset::option_count() const {
  if (items.empty()) return std::nullopt;
  const int n = items.front().option_count();
  for (const auto& item : items) {
    if (item.option_count() != n) return std::nullopt;
  }
  return n;
}

const MCQItem* Dataset::find(const std::string& id) const {
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

void validate_dataset(const Dataset& dataset) {
  if (dataset.items.empty()) throw EmptyDataset("dataset has no items");
  std::set<std::string> ids;
  for (const auto& item : dataset.items) {
    validate_item(item);
    if (!ids.insert(item.id).second) throw DuplicateId(item.id);
  }
}

}  // namespace mcqorder
