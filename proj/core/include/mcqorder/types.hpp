// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcqorder {

// Option labels are single letters, so option counts are capped at 26.
inline constexpr int kMaxOptions = 26;
inline constexpr int kMinOptions = 2;

/// Base class for all mcqorder errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(int line, const std::string& reason)
      : Error("malformed record at line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id) : Error("duplicate item id: " + id) {}
};

class EmptyDataset : public Error {
 public:
  explicit EmptyDataset(const std::string& what) : Error(what) {}
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class ExhaustiveTooLarge : public Error {
 public:
  explicit ExhaustiveTooLarge(int n)
      : Error("exhaustive enumeration requested for n=" + std::to_string(n) +
              " (supported for n <= 6)") {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class KOutOfRange : public Error {
 public:
  using Error::Error;
};

class EqualPositions : public Error {
 public:
  using Error::Error;
};

class PositionOutOfRange : public Error {
 public:
  using Error::Error;
};

class UnsupportedN : public Error {
 public:
  using Error::Error;
};

class MissingRanking : public Error {
 public:
  explicit MissingRanking(const std::string& item_id)
      : Error("no ranking available for item: " + item_id) {}
};

class MissingGapReport : public Error {
 public:
  using Error::Error;
};

class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

class EmptyPool : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Display label for a 0-based position: 0 -> 'A'.
char letter_for(int position);

/// 0-based position for a display letter, case-insensitive; -1 if not a letter.
int position_for(char letter);

using Metadata = std::map<std::string, std::string>;

/// One multiple-choice question: canonical option order plus the gold index.
struct MCQItem {
  std::string id;
  std::string question;
  std::vector<std::string> options;  // canonical order, trimmed, pairwise distinct
  int gold_index = 0;
  Metadata metadata;

  int option_count() const { return static_cast<int>(options.size()); }
  const std::string& gold_text() const { return options[static_cast<size_t>(gold_index)]; }
};

/// Throws Error if any MCQItem invariant is violated.
void validate_item(const MCQItem& item);

/// A bijection from display positions to canonical option indices:
/// perm[p] is the canonical index shown at position p.
class Ordering {
 public:
  explicit Ordering(std::vector<int> perm);
  static Ordering identity(int n);

  int size() const { return static_cast<int>(perm_.size()); }
  int canonical_at(int position) const { return perm_[static_cast<size_t>(position)]; }
  int position_of(int canonical) const { return inverse_[static_cast<size_t>(canonical)]; }
  const std::vector<int>& perm() const { return perm_; }
  Ordering inverse() const;
  bool is_identity() const;

  friend bool operator==(const Ordering& a, const Ordering& b) { return a.perm_ == b.perm_; }
  friend bool operator<(const Ordering& a, const Ordering& b) { return a.perm_ < b.perm_; }

 private:
  std::vector<int> perm_;
  std::vector<int> inverse_;
};

/// An item fixed to one display order. Letters are positional: position p
/// carries letter_for(p).
struct OrderedItem {
  MCQItem item;
  Ordering ordering;

  int size() const { return ordering.size(); }
  const std::string& option_at(int position) const {
    return item.options[static_cast<size_t>(ordering.canonical_at(position))];
  }
  int gold_position() const { return ordering.position_of(item.gold_index); }
  char gold_letter() const { return letter_for(gold_position()); }
  std::vector<std::string> displayed_options() const;
};

struct Dataset {
  std::string task_id;
  std::vector<MCQItem> items;

  /// Homogeneous option count, or nullopt for mixed datasets.
  std::optional<int> option_count() const;
  const MCQItem* find(const std::string& id) const;
};

/// Throws if the dataset or any item violates an invariant.
void validate_dataset(const Dataset& dataset);

}  // namespace mcqorder
