// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mcqorder/types.hpp"

namespace mcqorder {

/// Reads a JSONL dataset: one object per line with fields
///   id (string), question (string), options (array of strings),
///   answer_index (int), metadata (optional object of scalars).
/// Option texts are trimmed of surrounding whitespace and must stay
/// pairwise distinct afterwards. Blank lines are skipped.
/// Throws MalformedRecord / DuplicateId / EmptyDataset.
Dataset load_dataset(const std::filesystem::path& path);

/// Same, but with an explicit task id instead of the file stem.
Dataset load_dataset(std::istream& in, const std::string& task_id);

/// Writes the dataset back out as JSONL, one item per line, stable key order.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace mcqorder
