// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcqorder/version.hpp"

namespace mcqorder {

namespace {

std::string trim_copy(const std::string& text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_fixed1(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  if (std::string(buf) == "-0.0") return "0.0";
  return buf;
}

std::string format_fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_value(const nlohmann::json& value) {
  if (value.is_null()) return "";
  if (value.is_string()) return csv_escape(value.get<std::string>());
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number_unsigned())
    return std::to_string(value.get<unsigned long long>());
  if (value.is_number_float()) return format_double(value.get<double>());
  return csv_escape(value.dump());
}

void require_recorded(const RunConfig& config, ReportKind kind) {
  // Every model-driven report must be reproducible from its own header.
  for (const char* key : {"seed", "budget"}) {
    if (!config.has(key)) {
      throw ConfigError("report config for kind '" + to_string(kind) +
                        "' must record '" + std::string(key) + "'");
    }
  }
}

nlohmann::json cache_json(const CacheStats& cache) {
  return nlohmann::json{
      {"hits", cache.hits}, {"misses", cache.misses}, {"stores", cache.stores}};
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim_copy(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + stripped + "'");
    }
    std::string key = trim_copy(stripped.substr(0, eq));
    std::string value = trim_copy(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    config.values[key] = value;
  }
  return config;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  values[key] = value;
}

bool RunConfig::has(const std::string& key) const {
  return values.count(key) != 0;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string RunConfig::get_or(const std::string& key,
                              const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : values) out[key] = value;
  return out;
}

std::string to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::sensitivity: return "sensitivity";
    case ReportKind::hits: return "hits";
    case ReportKind::pattern: return "pattern";
    case ReportKind::calibration: return "calibration";
    case ReportKind::paper_check: return "paper-check";
  }
  throw Error("unknown report kind");
}

ReportKind report_kind_from(const std::string& text) {
  if (text == "sensitivity") return ReportKind::sensitivity;
  if (text == "hits") return ReportKind::hits;
  if (text == "pattern") return ReportKind::pattern;
  if (text == "calibration") return ReportKind::calibration;
  if (text == "paper-check" || text == "paper_check")
    return ReportKind::paper_check;
  throw ConfigError("unknown report kind: " + text);
}

std::string to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::json_lines: return "json-lines";
    case ReportFormat::csv: return "csv";
    case ReportFormat::markdown: return "markdown";
  }
  throw Error("unknown report format");
}

ReportFormat report_format_from(const std::string& text) {
  if (text == "json-lines" || text == "jsonl" || text == "json")
    return ReportFormat::json_lines;
  if (text == "csv") return ReportFormat::csv;
  if (text == "markdown" || text == "md") return ReportFormat::markdown;
  throw ConfigError("unknown report format: " + text);
}

std::string extension_for(ReportFormat format) {
  switch (format) {
    case ReportFormat::json_lines: return ".jsonl";
    case ReportFormat::csv: return ".csv";
    case ReportFormat::markdown: return ".md";
  }
  throw Error("unknown report format");
}

ReportBundle bundle_sensitivity(const SensitivityReport& report,
                                const RunConfig& config,
                                const CacheStats& cache) {
  require_recorded(config, ReportKind::sensitivity);
  ReportBundle bundle;
  bundle.kind = ReportKind::sensitivity;
  bundle.tool_version = kVersion;
  bundle.config = config.to_json();
  bundle.cache = cache_json(cache);
  bundle.summary = nlohmann::json{
      {"task_id", report.task_id},
      {"model_id", report.model_id},
      {"shots", report.shots},
      {"vanilla_acc", report.vanilla_acc},
      {"min_acc", report.min_acc},
      {"max_acc", report.max_acc},
      {"gap", report.gap},
      {"search_mode", report.search_mode.to_string()},
      {"items", static_cast<int>(report.per_item.size())},
  };
  for (const auto& item : report.per_item) {
    bundle.records.push_back(nlohmann::json{
        {"item_id", item.item_id},
        {"vanilla_correct", item.vanilla_correct},
        {"exists_correct", item.exists_correct},
        {"always_correct", item.always_correct},
        {"orderings_tested", item.orderings_tested},
        {"is_sensitive", item.is_sensitive},
    });
  }
  return bundle;
}

ReportBundle bundle_hits(const HitsReport& report, const RunConfig& config,
                         const CacheStats& cache) {
  require_recorded(config, ReportKind::hits);
  ReportBundle bundle;
  bundle.kind = ReportKind::hits;
  bundle.tool_version = kVersion;
  bundle.config = config.to_json();
  bundle.cache = cache_json(cache);
  bundle.summary = nlohmann::json{
      {"full_acc", report.full_acc},
      {"parse_failures", report.parse_failures},
      {"ranked_items", report.ranked_items},
  };
  for (const auto& [k, pct] : report.hits_at) {
    nlohmann::json record{{"k", k}, {"hits_pct", pct}};
    auto reduced = report.reduced_acc.find(k);
    if (reduced != report.reduced_acc.end()) {
      record["reduced_acc"] = reduced->second;
    }
    bundle.records.push_back(std::move(record));
  }
  return bundle;
}

ReportBundle bundle_pattern(const std::vector<CoverageResult>& results,
                            const RunConfig& config, const CacheStats& cache) {
  require_recorded(config, ReportKind::pattern);
  ReportBundle bundle;
  bundle.kind = ReportKind::pattern;
  bundle.tool_version = kVersion;
  bundle.config = config.to_json();
  bundle.cache = cache_json(cache);
  bundle.summary =
      nlohmann::json{{"runs", static_cast<int>(results.size())}};
  if (!results.empty()) {
    bundle.summary["task_id"] = results.front().task_id;
    bundle.summary["model_id"] = results.front().model_id;
  }
  for (const auto& result : results) {
    bundle.records.push_back(nlohmann::json{
        {"goal", to_string(result.goal)},
        {"task_id", result.task_id},
        {"model_id", result.model_id},
        {"placement", result.placement.label()},
        {"pos_top1", result.placement.pos_top1},
        {"pos_top2", result.placement.pos_top2},
        {"items", result.items},
        {"vanilla_acc", result.vanilla_acc},
        {"original_gap", result.original_gap},
        {"acc_placement", result.acc_placement},
        {"acc_reverse", result.acc_reverse},
        {"delta_max", result.delta_max},
        {"delta_min", result.delta_min},
        {"coverage_pct", result.coverage_pct},
    });
  }
  return bundle;
}

ReportBundle bundle_calibration(const CalibratedResult& result,
                                const RunConfig& config,
                                const CacheStats& cache) {
  require_recorded(config, ReportKind::calibration);
  ReportBundle bundle;
  bundle.kind = ReportKind::calibration;
  bundle.tool_version = kVersion;
  bundle.config = config.to_json();
  bundle.cache = cache_json(cache);
  bundle.summary = nlohmann::json{
      {"method", to_string(result.method)},
      {"accuracy_pct", result.accuracy_pct},
      {"vanilla_acc", result.vanilla_acc},
      {"delta_vs_vanilla", result.delta_vs_vanilla},
      {"correct", result.correct},
      {"total", result.total},
      {"abstentions", result.abstentions},
  };
  for (std::size_t i = 0; i < result.votes_per_item.size(); ++i) {
    nlohmann::json tally = nlohmann::json::object();
    for (const auto& [option, count] : result.votes_per_item[i]) {
      tally[std::to_string(option)] = count;
    }
    bundle.records.push_back(
        nlohmann::json{{"index", static_cast<int>(i)}, {"tally", tally}});
  }
  return bundle;
}

namespace {

std::string render_json_lines(const ReportBundle& bundle) {
  std::string out;
  nlohmann::json header{
      {"kind", to_string(bundle.kind)},
      {"tool_version", bundle.tool_version},
      {"config", bundle.config},
      {"cache", bundle.cache},
  };
  out += header.dump();
  out += '\n';
  out += bundle.summary.dump();
  out += '\n';
  for (const auto& record : bundle.records) {
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::string render_csv(const ReportBundle& bundle) {
  std::string out = "metric,value\n";
  out += "kind," + csv_escape(to_string(bundle.kind)) + '\n';
  out += "tool_version," + csv_escape(bundle.tool_version) + '\n';
  for (const auto& [key, value] : bundle.summary.items()) {
    out += csv_escape(key) + ',' + csv_value(value) + '\n';
  }
  if (bundle.records.empty()) return out;
  out += '\n';
  const auto& first = bundle.records.front();
  std::vector<std::string> columns;
  for (const auto& [key, value] : first.items()) {
    (void)value;
    columns.push_back(key);
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(columns[c]);
  }
  out += '\n';
  for (const auto& record : bundle.records) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      if (record.contains(columns[c])) out += csv_value(record.at(columns[c]));
    }
    out += '\n';
  }
  return out;
}

std::string md_cell(const nlohmann::json& value, bool fixed1) {
  if (value.is_null()) return "";
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "yes" : "no";
  if (value.is_number_float() && fixed1)
    return format_fixed1(value.get<double>());
  return csv_value(value);
}

std::string render_markdown(const ReportBundle& bundle) {
  std::ostringstream out;
  switch (bundle.kind) {
    case ReportKind::sensitivity: {
      const auto& s = bundle.summary;
      out << "# Order sensitivity\n\n";
      out << "| Task | Model | Vanilla | Min | Max | Gap |\n";
      out << "|---|---|---:|---:|---:|---:|\n";
      out << "| " << md_cell(s.at("task_id"), false) << " | "
          << md_cell(s.at("model_id"), false) << " | "
          << format_fixed1(s.at("vanilla_acc").get<double>()) << " | "
          << format_fixed1(s.at("min_acc").get<double>()) << " | "
          << format_fixed1(s.at("max_acc").get<double>()) << " | "
          << format_fixed1(s.at("gap").get<double>()) << " |\n";
      out << "\nSearch: " << md_cell(s.at("search_mode"), false) << ", "
          << s.at("items").get<int>() << " items.\n";
      break;
    }
    case ReportKind::hits: {
      out << "# Ranking quality\n\n";
      out << "| k | Hits@k | Reduced accuracy |\n";
      out << "|---:|---:|---:|\n";
      for (const auto& record : bundle.records) {
        out << "| " << record.at("k").get<int>() << " | "
            << format_fixed1(record.at("hits_pct").get<double>()) << " | ";
        if (record.contains("reduced_acc")) {
          out << format_fixed1(record.at("reduced_acc").get<double>());
        }
        out << " |\n";
      }
      out << "\nFull accuracy: "
          << format_fixed1(bundle.summary.at("full_acc").get<double>())
          << ", parse failures: "
          << bundle.summary.at("parse_failures").get<int>() << ".\n";
      break;
    }
    case ReportKind::pattern: {
      out << "# Placement coverage\n\n";
      out << "| Goal | Placement | Vanilla | Placed | Reversed | Delta max | "
             "Delta min | Coverage |\n";
      out << "|---|---|---:|---:|---:|---:|---:|---:|\n";
      for (const auto& record : bundle.records) {
        out << "| " << md_cell(record.at("goal"), false) << " | "
            << md_cell(record.at("placement"), false) << " | "
            << format_fixed1(record.at("vanilla_acc").get<double>()) << " | "
            << format_fixed1(record.at("acc_placement").get<double>()) << " | "
            << format_fixed1(record.at("acc_reverse").get<double>()) << " | "
            << format_fixed1(record.at("delta_max").get<double>()) << " | "
            << format_fixed1(record.at("delta_min").get<double>()) << " | "
            << format_fixed1(record.at("coverage_pct").get<double>())
            << " |\n";
      }
      break;
    }
    case ReportKind::calibration: {
      const auto& s = bundle.summary;
      out << "# Calibrated accuracy\n\n";
      out << "| Method | Accuracy | Vanilla | Delta | Abstentions |\n";
      out << "|---|---:|---:|---:|---:|\n";
      out << "| " << md_cell(s.at("method"), false) << " | "
          << format_fixed1(s.at("accuracy_pct").get<double>()) << " | "
          << format_fixed1(s.at("vanilla_acc").get<double>()) << " | "
          << format_fixed1(s.at("delta_vs_vanilla").get<double>()) << " | "
          << s.at("abstentions").get<int>() << " |\n";
      break;
    }
    case ReportKind::paper_check: {
      out << "# Reference coverage check\n\n";
      out << "| Model | Task | Goal | Computed | Published | Diff | Anomaly "
             "|\n";
      out << "|---|---|---|---:|---:|---:|---|\n";
      for (const auto& record : bundle.records) {
        out << "| " << md_cell(record.at("model"), false) << " | "
            << md_cell(record.at("task"), false) << " | "
            << md_cell(record.at("goal"), false) << " | "
            << format_fixed1(record.at("computed").get<double>()) << " | "
            << format_fixed1(record.at("published").get<double>()) << " | "
            << format_fixed1(record.at("diff").get<double>()) << " | "
            << md_cell(record.at("anomaly"), false) << " |\n";
      }
      out << "\n" << bundle.summary.at("within_tolerance").get<int>() << " of "
          << bundle.records.size() << " cells within "
          << format_fixed2(bundle.summary.at("tolerance").get<double>())
          << " points.\n";
      break;
    }
  }
  return out.str();
}

}  // namespace

std::string render_report(const ReportBundle& bundle, ReportFormat format) {
  switch (format) {
    case ReportFormat::json_lines: return render_json_lines(bundle);
    case ReportFormat::csv: return render_csv(bundle);
    case ReportFormat::markdown: return render_markdown(bundle);
  }
  throw Error("unknown report format");
}

void emit_report(const ReportBundle& bundle, ReportFormat format,
                 const std::filesystem::path& out_path) {
  if (out_path.has_parent_path()) {
    std::filesystem::create_directories(out_path.parent_path());
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open report file: " + out_path.string());
  out << render_report(bundle, format);
  if (!out) throw IoError("short write to report file: " + out_path.string());
}

ReportBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report file: " + path.string());
  std::string line;
  std::vector<nlohmann::json> lines;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_copy(line).empty()) continue;
    try {
      lines.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("report " + path.string() + " line " +
                    std::to_string(line_no) + ": " + e.what());
    }
  }
  if (lines.size() < 2) {
    throw IoError("report " + path.string() +
                  ": expected header and summary lines");
  }
  ReportBundle bundle;
  const auto& header = lines.front();
  if (!header.is_object() || !header.contains("kind")) {
    throw IoError("report " + path.string() + ": malformed header line");
  }
  bundle.kind = report_kind_from(header.at("kind").get<std::string>());
  bundle.tool_version = header.value("tool_version", "");
  bundle.config = header.value("config", nlohmann::json::object());
  bundle.cache = header.value("cache", nlohmann::json::object());
  bundle.summary = lines[1];
  bundle.records.assign(lines.begin() + 2, lines.end());
  return bundle;
}

namespace {

// Published per-task reference numbers: vanilla accuracy, the extreme
// accuracy deltas over all orderings, the deltas reached by the four
// placement patterns, and the rounded coverage percentages as printed.
struct ReferenceRow {
  const char* model;
  const char* task;
  double vanilla;
  double delta_min;
  double delta_max;
  double amp_min;
  double amp_max;
  double mit_min;
  double mit_max;
  double published_amp;
  double published_mit;
};

constexpr ReferenceRow kReferenceRows[] = {
    {"GPT-4", "CSQA", 84.3, -12.6, 10.3, -8.0, 6.4, -4.8, 0.4, 62.9, 22.7},
    {"GPT-4", "Logical Deduction", 92.3, -8.1, 5.0, -3.1, 2.4, 1.3, 1.3, 42.0,
     10.1},
    {"GPT-4", "Abstract Algebra", 57.0, -30.0, 23.0, -19.0, 9.0, -7.0, 1.0,
     52.8, 15.1},
    {"GPT-4", "High School Chemistry", 71.9, -23.6, 18.2, -7.0, 2.0, -11.6,
     -2.0, 21.5, 22.9},
    {"GPT-4", "Professional Law", 66.1, -12.7, 12.1, -3.8, 4.0, 3.2, 5.6, 31.5,
     9.7},
    {"InstructGPT", "CSQA", 72.3, -24.0, 19.1, -16.0, 14.9, -7.7, 8.8, 71.7,
     38.3},
    {"InstructGPT", "Logical Deduction", 64.0, -39.4, 34.7, -28.4, 17.3, 0.7,
     0.7, 61.7, 0.9},
    {"InstructGPT", "Abstract Algebra", 33.0, -31.0, 39.0, -17.0, 8.0, -9.0,
     9.0, 35.7, 25.7},
    {"InstructGPT", "High School Chemistry", 44.8, -28.5, 38.0, -11.6, 5.5,
     -9.3, 7.8, 25.7, 25.7},
    {"InstructGPT", "Professional Law", 48.6, -24.9, 25.7, -6.4, 3.7, -7.6,
     5.5, 20.1, 25.9},
};

PaperCheckRow make_check_row(const ReferenceRow& ref, PatternGoal goal,
                             double tolerance) {
  PaperCheckRow row;
  row.model = ref.model;
  row.task = ref.task;
  row.goal = goal;
  row.original_gap = ref.delta_max - ref.delta_min;
  if (goal == PatternGoal::amplify) {
    row.delta_min = ref.amp_min;
    row.delta_max = ref.amp_max;
    row.published = ref.published_amp;
  } else {
    row.delta_min = ref.mit_min;
    row.delta_max = ref.mit_max;
    row.published = ref.published_mit;
  }
  row.computed = (row.delta_max - row.delta_min) / row.original_gap * 100.0;
  row.diff = row.computed - row.published;
  row.anomaly = std::fabs(row.diff) > tolerance;
  return row;
}

}  // namespace

PaperCheckTable paper_check() {
  PaperCheckTable table;
  for (const auto& ref : kReferenceRows) {
    for (PatternGoal goal : {PatternGoal::amplify, PatternGoal::mitigate}) {
      PaperCheckRow row = make_check_row(ref, goal, table.tolerance);
      if (row.anomaly) {
        ++table.anomalies;
      } else {
        ++table.within_tolerance;
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

ReportBundle bundle_paper_check(const PaperCheckTable& table,
                                const RunConfig& config) {
  ReportBundle bundle;
  bundle.kind = ReportKind::paper_check;
  bundle.tool_version = kVersion;
  bundle.config = config.to_json();
  bundle.cache = cache_json(CacheStats{});
  bundle.summary = nlohmann::json{
      {"tolerance", table.tolerance},
      {"within_tolerance", table.within_tolerance},
      {"anomalies", table.anomalies},
      {"rows", static_cast<int>(table.rows.size())},
  };
  for (const auto& row : table.rows) {
    bundle.records.push_back(nlohmann::json{
        {"model", row.model},
        {"task", row.task},
        {"goal", to_string(row.goal)},
        {"original_gap", row.original_gap},
        {"delta_min", row.delta_min},
        {"delta_max", row.delta_max},
        {"computed", row.computed},
        {"published", row.published},
        {"diff", row.diff},
        {"anomaly", row.anomaly},
    });
  }
  return bundle;
}

std::vector<std::pair<double, double>> reference_gap_error_pairs(
    const std::string& model) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& ref : kReferenceRows) {
    if (model != ref.model) continue;
    pairs.emplace_back(ref.delta_max - ref.delta_min, 100.0 - ref.vanilla);
  }
  if (pairs.empty()) {
    throw ConfigError("unknown reference model: " + model +
                      " (expected GPT-4 or InstructGPT)");
  }
  return pairs;
}

}  // namespace mcqorder
