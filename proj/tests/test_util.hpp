// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "mcqorder/types.hpp"

namespace mcqorder::testing {

inline MCQItem make_item(std::string id, std::string question,
                         std::vector<std::string> options, int gold) {
  MCQItem item;
  item.id = std::move(id);
  item.question = std::move(question);
  item.options = std::move(options);
  item.gold_index = gold;
  return item;
}

inline Dataset make_dataset(std::string task_id, std::vector<MCQItem> items) {
  Dataset dataset;
  dataset.task_id = std::move(task_id);
  dataset.items = std::move(items);
  return dataset;
}

// Unique scratch directory, removed on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mcqorder-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mcqorder::testing
