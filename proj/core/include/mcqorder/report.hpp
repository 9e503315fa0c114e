// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcqorder/calibration.hpp"
#include "mcqorder/client.hpp"
#include "mcqorder/patterns.hpp"
#include "mcqorder/sensitivity.hpp"
#include "mcqorder/sorting.hpp"

namespace mcqorder {

// Flat key=value run configuration. Values stay strings; consumers parse what
// they need. Keys are unique, later assignments overwrite earlier ones.
struct RunConfig {
  std::map<std::string, std::string> values;

  static RunConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;

  nlohmann::json to_json() const;
};

enum class ReportKind {
  sensitivity,
  hits,
  pattern,
  calibration,
  paper_check,
};

std::string to_string(ReportKind kind);
ReportKind report_kind_from(const std::string& text);

enum class ReportFormat {
  json_lines,
  csv,
  markdown,
};

std::string to_string(ReportFormat format);
ReportFormat report_format_from(const std::string& text);
std::string extension_for(ReportFormat format);

// A report bundle is the unit of emission: one header (tool version, config
// snapshot, cache counters), one summary object, and zero or more records.
// Bundles carry no timestamps; emitting the same bundle twice must produce
// byte-identical files.
struct ReportBundle {
  ReportKind kind = ReportKind::sensitivity;
  std::string tool_version;
  nlohmann::json config;
  nlohmann::json cache;
  nlohmann::json summary;
  std::vector<nlohmann::json> records;
};

ReportBundle bundle_sensitivity(const SensitivityReport& report,
                                const RunConfig& config,
                                const CacheStats& cache);
ReportBundle bundle_hits(const HitsReport& report, const RunConfig& config,
                         const CacheStats& cache);
ReportBundle bundle_pattern(const std::vector<CoverageResult>& results,
                            const RunConfig& config, const CacheStats& cache);
ReportBundle bundle_calibration(const CalibratedResult& result,
                                const RunConfig& config,
                                const CacheStats& cache);

void emit_report(const ReportBundle& bundle, ReportFormat format,
                 const std::filesystem::path& out_path);
std::string render_report(const ReportBundle& bundle, ReportFormat format);
ReportBundle load_bundle(const std::filesystem::path& path);

// Arithmetic check against the published reference tables embedded below.
// One row per model x task x goal cell; `computed` re-derives the coverage
// percentage from the per-task accuracy deltas, `published` is the rounded
// value printed in the reference, `anomaly` marks cells where the two cannot
// be reconciled within tolerance.
struct PaperCheckRow {
  std::string model;
  std::string task;
  PatternGoal goal = PatternGoal::amplify;
  double original_gap = 0.0;
  double delta_min = 0.0;
  double delta_max = 0.0;
  double computed = 0.0;
  double published = 0.0;
  double diff = 0.0;
  bool anomaly = false;
};

struct PaperCheckTable {
  double tolerance = 0.15;
  std::vector<PaperCheckRow> rows;
  int within_tolerance = 0;
  int anomalies = 0;
};

PaperCheckTable paper_check();
ReportBundle bundle_paper_check(const PaperCheckTable& table,
                                const RunConfig& config);

// (sensitivity gap, vanilla error rate) pairs for one reference model across
// the five reference tasks, in canonical task order. `model` is "GPT-4" or
// "InstructGPT".
std::vector<std::pair<double, double>> reference_gap_error_pairs(
    const std::string& model);

}  // namespace mcqorder
