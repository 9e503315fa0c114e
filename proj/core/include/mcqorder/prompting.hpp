// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcqorder/types.hpp"

namespace mcqorder {

enum class TemplateKind { mcq, self_verify, sort, mec };

std::string to_string(TemplateKind kind);

/// Prompt templates with {question}, {choices}, and {letters} placeholders.
struct TemplateSet {
  std::string mcq;
  std::string self_verify;
  std::string sort;
  std::string mec;

  static TemplateSet defaults();
  /// Loads overrides from an INI-style file with [mcq] / [self_verify] /
  /// [sort] / [mec] sections; unlisted kinds keep their defaults.
  static TemplateSet from_file(const std::filesystem::path& path);

  const std::string& for_kind(TemplateKind kind) const;
};

/// "A and B" for n=2; "A, B, and C" style beyond. Used for {letters}.
std::string letter_list_phrase(int n);

/// "A) first B) second" with single spaces between entries.
std::string render_choices(const OrderedItem& ordered);

std::string render_mcq_prompt(const TemplateSet& templates, const OrderedItem& ordered);
std::string render_self_verification_prompt(const TemplateSet& templates,
                                            const OrderedItem& ordered);
std::string render_sort_prompt(const TemplateSet& templates, const OrderedItem& ordered);
std::string render_mec_prompt(const TemplateSet& templates, const OrderedItem& ordered);

/// Fixed pool of solved examples that demonstrations are drawn from.
struct DemonstrationPool {
  std::vector<MCQItem> items;
  std::string similarity = "lexical";
};

/// Deterministically draws `size` items from `source` (seeded shuffle),
/// excluding any ids present in `disjoint_from`.
DemonstrationPool make_pool(const Dataset& source, int size, std::uint64_t seed,
                            const Dataset* disjoint_from = nullptr);

/// Throws ConfigError if any pool item id also appears in the eval set.
void validate_pool_disjoint(const DemonstrationPool& pool, const Dataset& eval_set);

/// Maps a batch of texts to equal-length embedding vectors. Unknown
/// providers fall back to a lexical bag-of-words embedding.
using EmbeddingProvider =
    std::function<std::vector<std::vector<double>>(const std::vector<std::string>&)>;

struct DemoSelection {
  std::vector<MCQItem> demos;  // most similar first
  bool lexical_fallback = false;
};

/// k nearest pool items to the target question by Euclidean distance over
/// the embedding of question texts. Ties resolve to the earlier pool item.
/// provider == nullptr means lexical similarity.
DemoSelection select_demonstrations(const MCQItem& target, const DemonstrationPool& pool, int k,
                                    const EmbeddingProvider* provider = nullptr);

/// Whether demonstration options are shown canonically or co-reordered with
/// the target's ordering pattern.
enum class DemoOrderingPolicy { canonical, random };

struct FewShotRender {
  std::string prompt;
  std::vector<std::string> demo_ids;
};

/// Demonstration blocks (rendered prompt + " " + gold letter), separated by
/// blank lines, with the target prompt last. Random policy reorders each
/// demo independently from `seed`.
FewShotRender render_fewshot_prompt(const TemplateSet& templates,
                                    const std::vector<MCQItem>& demos,
                                    const OrderedItem& target, DemoOrderingPolicy policy,
                                    std::uint64_t seed);

}  // namespace mcqorder
