// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mcqorder {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

MCQItem parse_record(const nlohmann::json& j, int line) {
  if (!j.is_object()) throw MalformedRecord(line, "not a JSON object");
  MCQItem item;
  if (!j.contains("id") || !j["id"].is_string()) {
    throw MalformedRecord(line, "missing string field 'id'");
  }
  item.id = j["id"].get<std::string>();
  if (item.id.empty()) throw MalformedRecord(line, "empty 'id'");
  if (!j.contains("question") || !j["question"].is_string()) {
    throw MalformedRecord(line, "missing string field 'question'");
  }
  item.question = j["question"].get<std::string>();
  if (!j.contains("options") || !j["options"].is_array()) {
    throw MalformedRecord(line, "missing array field 'options'");
  }
  std::set<std::string> seen;
  for (const auto& opt : j["options"]) {
    if (!opt.is_string()) throw MalformedRecord(line, "non-string entry in 'options'");
    std::string text = trim(opt.get<std::string>());
    if (text.empty()) throw MalformedRecord(line, "empty option text");
    if (!seen.insert(text).second) {
      throw MalformedRecord(line, "duplicate option text after trimming: " + text);
    }
    item.options.push_back(std::move(text));
  }
  const int n = item.option_count();
  if (n < kMinOptions || n > kMaxOptions) {
    throw MalformedRecord(line, "option count " + std::to_string(n) + " outside [" +
                                    std::to_string(kMinOptions) + ", " +
                                    std::to_string(kMaxOptions) + "]");
  }
  if (!j.contains("answer_index") || !j["answer_index"].is_number_integer()) {
    throw MalformedRecord(line, "missing integer field 'answer_index'");
  }
  item.gold_index = j["answer_index"].get<int>();
  if (item.gold_index < 0 || item.gold_index >= n) {
    throw MalformedRecord(line, "answer_index " + std::to_string(item.gold_index) +
                                    " outside option range");
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw MalformedRecord(line, "'metadata' is not an object");
    for (const auto& [key, value] : j["metadata"].items()) {
      if (value.is_string()) {
        item.metadata[key] = value.get<std::string>();
      } else if (value.is_boolean()) {
        item.metadata[key] = value.get<bool>() ? "true" : "false";
      } else if (value.is_number()) {
        item.metadata[key] = value.dump();
      } else {
        throw MalformedRecord(line, "metadata value for '" + key + "' is not a scalar");
      }
    }
  }
  return item;
}

}  // namespace

Dataset load_dataset(std::istream& in, const std::string& task_id) {
  Dataset dataset;
  dataset.task_id = task_id;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(stripped);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedRecord(line_no, std::string("invalid JSON: ") + e.what());
    }
    MCQItem item = parse_record(j, line_no);
    if (!ids.insert(item.id).second) throw DuplicateId(item.id);
    dataset.items.push_back(std::move(item));
  }
  if (dataset.items.empty()) throw EmptyDataset("dataset '" + task_id + "' has no items");
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path.string());
  return load_dataset(in, path.stem().string());
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  for (const auto& item : dataset.items) {
    nlohmann::ordered_json j;
    j["id"] = item.id;
    j["question"] = item.question;
    j["options"] = item.options;
    j["answer_index"] = item.gold_index;
    if (!item.metadata.empty()) {
      nlohmann::ordered_json meta;
      for (const auto& [key, value] : item.metadata) meta[key] = value;
      j["metadata"] = meta;
    }
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing dataset to: " + path.string());
}

}  // namespace mcqorder
