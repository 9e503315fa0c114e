// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface. Every subcommand resolves its options from the
// command line first and a flat key=value config file (--config) second,
// builds one client, runs the experiment, and emits a report bundle.
// Exit codes: 0 success, 1 experiment failure, 2 configuration error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mcqorder/calibration.hpp"
#include "mcqorder/client.hpp"
#include "mcqorder/dataset.hpp"
#include "mcqorder/eval.hpp"
#include "mcqorder/orderings.hpp"
#include "mcqorder/patterns.hpp"
#include "mcqorder/report.hpp"
#include "mcqorder/sensitivity.hpp"
#include "mcqorder/sorting.hpp"
#include "mcqorder/version.hpp"

namespace {

using namespace mcqorder;

struct CommonArgs {
  std::string config_path;
  std::string dataset_path;
  std::string model = "simulated:demo";
  std::string endpoint;
  std::string api_key_env = "MCQ_API_KEY";
  std::string cache_dir;
  std::string template_file;
  std::string out_dir = "reports";
  std::string format = "json-lines";
  std::string budget;  // empty: resolved from the model and dataset
  std::uint64_t seed = 0;
  int shots = 0;
  std::string pool_path;
  int pool_size = 0;  // 0: whole pool source
  std::uint64_t demo_seed = 0;
  std::string demo_policy = "canonical";
  bool co_reorder = false;
  int workers = 1;
};

void add_config_flag(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "Flat key=value file; command-line flags win");
}

void add_model_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--dataset", args.dataset_path, "Evaluation items (JSONL)");
  cmd->add_option("--model", args.model,
                  "Model id; simulated:demo, simulated:<spec>.json, or a "
                  "remote model name");
  cmd->add_option("--endpoint", args.endpoint,
                  "Completion endpoint URL for remote models");
  cmd->add_option("--api-key-env", args.api_key_env,
                  "Environment variable holding the API key");
  cmd->add_option("--cache-dir", args.cache_dir, "Response cache directory");
  cmd->add_option("--template-file", args.template_file,
                  "Prompt template overrides (INI sections)");
  cmd->add_option("--workers", args.workers, "Concurrent item queries");
  cmd->add_option("--seed", args.seed, "Run seed (recorded in the report)");
}

void add_fewshot_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--shots", args.shots, "Demonstrations per prompt");
  cmd->add_option("--pool", args.pool_path,
                  "Demonstration pool source (JSONL), disjoint from the "
                  "evaluation set");
  cmd->add_option("--pool-size", args.pool_size,
                  "Demonstrations drawn from the pool source (0 = all)");
  cmd->add_option("--demo-seed", args.demo_seed, "Pool sampling seed");
  cmd->add_option("--demo-policy", args.demo_policy,
                  "Demonstration option order: canonical or random")
      ->check(CLI::IsMember({"canonical", "random"}));
  cmd->add_flag("--co-reorder", args.co_reorder,
                "Apply the target's ordering to same-size demonstrations");
}

void add_output_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--out", args.out_dir, "Report output directory");
  cmd->add_option("--format", args.format,
                  "Report format: json-lines, csv, or markdown");
}

// Config-file fallback: a file value applies only when the flag was not
// passed on the command line. Unknown keys are rejected.
void apply_config_file(CLI::App* cmd, CommonArgs& args,
                       const std::vector<std::pair<std::string, std::string*>>&
                           extra_strings = {}) {
  if (args.config_path.empty()) return;
  RunConfig file = RunConfig::from_file(args.config_path);
  auto flag_given = [cmd](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  for (const auto& [key, value] : file.values) {
    if (key == "dataset" && !flag_given("--dataset")) {
      args.dataset_path = value;
    } else if (key == "model" && !flag_given("--model")) {
      args.model = value;
    } else if (key == "endpoint" && !flag_given("--endpoint")) {
      args.endpoint = value;
    } else if (key == "api_key_env" && !flag_given("--api-key-env")) {
      args.api_key_env = value;
    } else if (key == "cache_dir" && !flag_given("--cache-dir")) {
      args.cache_dir = value;
    } else if (key == "template_file" && !flag_given("--template-file")) {
      args.template_file = value;
    } else if (key == "out" && !flag_given("--out")) {
      args.out_dir = value;
    } else if (key == "format" && !flag_given("--format")) {
      args.format = value;
    } else if (key == "budget" && !flag_given("--budget")) {
      args.budget = value;
    } else if (key == "seed" && !flag_given("--seed")) {
      args.seed = std::stoull(value);
    } else if (key == "shots" && !flag_given("--shots")) {
      args.shots = std::stoi(value);
    } else if (key == "pool" && !flag_given("--pool")) {
      args.pool_path = value;
    } else if (key == "pool_size" && !flag_given("--pool-size")) {
      args.pool_size = std::stoi(value);
    } else if (key == "demo_seed" && !flag_given("--demo-seed")) {
      args.demo_seed = std::stoull(value);
    } else if (key == "demo_policy" && !flag_given("--demo-policy")) {
      args.demo_policy = value;
    } else if (key == "co_reorder" && !flag_given("--co-reorder")) {
      args.co_reorder = (value == "true" || value == "1");
    } else if (key == "workers" && !flag_given("--workers")) {
      args.workers = std::stoi(value);
    } else {
      bool matched = false;
      for (const auto& [extra_key, target] : extra_strings) {
        if (key == extra_key) {
          *target = value;
          matched = true;
          break;
        }
      }
      if (!matched) throw ConfigError("unknown config key: " + key);
    }
  }
}

bool is_simulated(const std::string& model_id) {
  return model_id.rfind("simulated:", 0) == 0;
}

CompletionClient make_client(const CommonArgs& args) {
  ClientConfig config;
  if (!args.endpoint.empty()) {
    EndpointConfig endpoint;
    endpoint.url = args.endpoint;
    endpoint.api_key_env = args.api_key_env;
    config.endpoint = endpoint;
  }
  if (!args.cache_dir.empty()) config.cache_dir = args.cache_dir;
  config.max_inflight = std::max(1, args.workers);
  if (!is_simulated(args.model)) {
    if (args.endpoint.empty()) {
      throw ConfigError("model '" + args.model +
                        "' needs --endpoint (or use simulated:demo)");
    }
    if (!args.api_key_env.empty() &&
        std::getenv(args.api_key_env.c_str()) == nullptr) {
      throw ConfigError("environment variable " + args.api_key_env +
                        " is not set; export it with the API key for " +
                        args.endpoint + " (the key itself never goes into "
                        "reports)");
    }
  }
  return CompletionClient(config);
}

Dataset load_required_dataset(const CommonArgs& args) {
  if (args.dataset_path.empty()) throw ConfigError("--dataset is required");
  return load_dataset(args.dataset_path);
}

RunOptions make_run_options(const CommonArgs& args) {
  RunOptions options;
  if (!args.template_file.empty()) {
    options.templates = TemplateSet::from_file(args.template_file);
  }
  options.workers = std::max(1, args.workers);
  return options;
}

// Default search budget: exhaustive when the model is simulated and every
// item has at most 5 options; otherwise 11 orderings per item (the
// identity plus 10 random reorders).
Budget resolve_budget(const CommonArgs& args, const Dataset& dataset) {
  if (!args.budget.empty()) return Budget::parse(args.budget);
  int max_n = 0;
  for (const auto& item : dataset.items) {
    max_n = std::max(max_n, item.option_count());
  }
  if (is_simulated(args.model) && max_n <= 5) return Budget::exhaustive();
  return Budget::sampled(11);
}

struct PoolHolder {
  Dataset source;
  DemonstrationPool pool;
};

// Builds the demonstration pool when few-shot prompting is requested. The
// holder owns the storage the FewShotConfig points into.
std::optional<PoolHolder> make_fewshot_pool(const CommonArgs& args,
                                            const Dataset& eval_set) {
  if (args.shots <= 0) return std::nullopt;
  if (args.pool_path.empty()) {
    throw ConfigError("--shots needs --pool (a demonstration source)");
  }
  PoolHolder holder;
  holder.source = load_dataset(args.pool_path);
  int size = args.pool_size > 0 ? args.pool_size
                                : static_cast<int>(holder.source.items.size());
  holder.pool = make_pool(holder.source, size, args.demo_seed, &eval_set);
  validate_pool_disjoint(holder.pool, eval_set);
  return holder;
}

FewShotConfig make_fewshot(const CommonArgs& args,
                           const std::optional<PoolHolder>& holder) {
  FewShotConfig fewshot;
  fewshot.shots = args.shots;
  fewshot.pool = holder ? &holder->pool : nullptr;
  fewshot.policy = args.demo_policy == "random" ? DemoOrderingPolicy::random
                                                : DemoOrderingPolicy::canonical;
  fewshot.demo_seed = args.demo_seed;
  fewshot.co_reorder_demos = args.co_reorder;
  return fewshot;
}

RunConfig record_config(const CommonArgs& args, const std::string& budget_str) {
  RunConfig config;
  config.set("tool_version", kVersion);
  config.set("dataset", args.dataset_path);
  config.set("model", args.model);
  config.set("seed", std::to_string(args.seed));
  config.set("budget", budget_str);
  config.set("format", args.format);
  config.set("workers", std::to_string(args.workers));
  config.set("shots", std::to_string(args.shots));
  if (!args.endpoint.empty()) {
    config.set("endpoint", args.endpoint);
    config.set("api_key_env", args.api_key_env);
  }
  if (!args.cache_dir.empty()) config.set("cache_dir", args.cache_dir);
  if (!args.template_file.empty())
    config.set("template_file", args.template_file);
  if (args.shots > 0) {
    config.set("pool", args.pool_path);
    config.set("pool_size", std::to_string(args.pool_size));
    config.set("demo_seed", std::to_string(args.demo_seed));
    config.set("demo_policy", args.demo_policy);
    config.set("co_reorder", args.co_reorder ? "true" : "false");
  }
  return config;
}

std::string sanitize_for_filename(const std::string& text) {
  std::string out;
  for (char c : text) {
    bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out.push_back(keep ? c : '-');
  }
  return out.empty() ? "report" : out;
}

std::filesystem::path write_bundle(const ReportBundle& bundle,
                                   const std::string& stem,
                                   const CommonArgs& args) {
  ReportFormat format = report_format_from(args.format);
  std::filesystem::path path =
      std::filesystem::path(args.out_dir) /
      (sanitize_for_filename(stem) + extension_for(format));
  emit_report(bundle, format, path);
  std::cout << "wrote " << path.string() << "\n";
  return path;
}

void print_bundle(const ReportBundle& bundle) {
  std::cout << render_report(bundle, ReportFormat::markdown);
}

int option_count_or_throw(const Dataset& dataset) {
  auto n = dataset.option_count();
  if (!n) {
    throw ConfigError(
        "placement experiments need a uniform option count across items");
  }
  return *n;
}

// Rebuilds the scalar half of a sensitivity report from an emitted bundle;
// enough for gap-report consumers (vanilla accuracy and gap).
SensitivityReport sensitivity_from_bundle(const ReportBundle& bundle) {
  if (bundle.kind != ReportKind::sensitivity) {
    throw ConfigError("--gap-report must point at a sensitivity report");
  }
  SensitivityReport report;
  const auto& s = bundle.summary;
  report.task_id = s.value("task_id", "");
  report.model_id = s.value("model_id", "");
  report.shots = s.value("shots", 0);
  report.vanilla_acc = s.value("vanilla_acc", 0.0);
  report.min_acc = s.value("min_acc", 0.0);
  report.max_acc = s.value("max_acc", 0.0);
  report.gap = s.value("gap", 0.0);
  return report;
}

// --- subcommand drivers ---

struct EvaluateCmd {
  CommonArgs common;

  int run() {
    Dataset dataset = load_required_dataset(common);
    auto holder = make_fewshot_pool(common, dataset);
    FewShotConfig fewshot = make_fewshot(common, holder);
    RunOptions options = make_run_options(common);
    CompletionClient client = make_client(common);
    EvalOutcome outcome =
        evaluate_vanilla(client, common.model, dataset, fewshot, options);
    std::cout << "task " << dataset.task_id << ", model " << common.model
              << ": vanilla accuracy " << outcome.accuracy_pct << "% ("
              << outcome.correct << "/" << outcome.total << ", "
              << outcome.abstained << " abstained)\n";
    return 0;
  }
};

struct SensitivityCmd {
  CommonArgs common;
  bool self_verify = false;

  int run() {
    Dataset dataset = load_required_dataset(common);
    auto holder = make_fewshot_pool(common, dataset);
    FewShotConfig fewshot = make_fewshot(common, holder);
    RunOptions options = make_run_options(common);
    Budget budget = resolve_budget(common, dataset);
    CompletionClient client = make_client(common);
    SensitivityReport report = oracle_minmax(client, common.model, dataset,
                                             fewshot, budget, common.seed,
                                             options);
    RunConfig config = record_config(common, budget.to_string());
    ReportBundle bundle =
        bundle_sensitivity(report, config, client.cache_stats());
    if (self_verify) {
      std::vector<MCQItem> sensitive;
      for (std::size_t i = 0; i < report.per_item.size(); ++i) {
        if (report.per_item[i].is_sensitive) {
          sensitive.push_back(dataset.items[i]);
        }
      }
      SelfVerifyOutcome verify =
          self_verification_rate(client, common.model, sensitive, options);
      bundle.summary["self_verify_yes_pct"] = verify.yes_pct;
      bundle.summary["self_verify_total"] = verify.total;
      std::cout << "self-verify yes-rate on sensitive items: "
                << verify.yes_pct << "% (" << verify.yes << "/" << verify.total
                << ")\n";
    }
    print_bundle(bundle);
    write_bundle(bundle, "sensitivity-" + dataset.task_id, common);
    return 0;
  }
};

struct SortEvalCmd {
  CommonArgs common;
  std::string save_rankings_path;

  int run() {
    Dataset dataset = load_required_dataset(common);
    RunOptions options = make_run_options(common);
    CompletionClient client = make_client(common);
    if (!save_rankings_path.empty()) {
      SortRun run = sort_all(client, common.model, dataset, options);
      save_rankings(run.rankings, save_rankings_path);
      std::cout << "wrote " << save_rankings_path << " ("
                << run.rankings.size() << " rankings, " << run.parse_failures
                << " parse failures)\n";
    }
    HitsReport report = hits_report(client, common.model, dataset, options);
    // One ordering per item (the identity); recorded for provenance.
    RunConfig config = record_config(common, "1");
    ReportBundle bundle = bundle_hits(report, config, client.cache_stats());
    print_bundle(bundle);
    write_bundle(bundle, "hits-" + dataset.task_id, common);
    return 0;
  }
};

struct PatternsCmd {
  CommonArgs common;
  std::string goal = "both";
  std::string placement_text;
  std::string family;
  std::string gap_report_path;
  std::string rankings_path;
  bool use_model_top1 = false;

  PlacementSpec placement_for(PatternGoal g, int n) const {
    if (!placement_text.empty()) {
      return PlacementSpec::from_text(placement_text, n);
    }
    if (!family.empty()) {
      ModelFamily fam = family == "instruct-like" ? ModelFamily::instruct_like
                                                  : ModelFamily::gpt4_like;
      PresetEntry entry = preset_placements(fam, n, g);
      if (entry.position_out_of_range) {
        throw ConfigError("preset placement " + entry.placement.label() +
                          " names a position beyond the option count; pass "
                          "--placement explicitly");
      }
      return entry.placement;
    }
    PlacementSpec spec;
    spec.n = n;
    spec.pos_top1 = 0;
    // Default placements: extremes amplify, adjacency mitigates.
    spec.pos_top2 = g == PatternGoal::amplify ? n - 1 : 1;
    return spec;
  }

  int run() {
    Dataset dataset = load_required_dataset(common);
    int n = option_count_or_throw(dataset);
    RunOptions options = make_run_options(common);
    Budget budget = resolve_budget(common, dataset);
    CompletionClient client = make_client(common);

    SensitivityReport gap_report;
    if (!gap_report_path.empty()) {
      gap_report = sensitivity_from_bundle(load_bundle(gap_report_path));
    } else {
      std::cout << "no --gap-report; measuring the sensitivity gap first\n";
      gap_report = oracle_minmax(client, common.model, dataset, FewShotConfig{},
                                 budget, common.seed, options);
    }

    RankingMap rankings;
    if (!rankings_path.empty()) {
      rankings = to_ranking_map(load_rankings(rankings_path));
    } else {
      SortRun run = sort_all(client, common.model, dataset, options);
      if (run.parse_failures > 0) {
        std::cout << run.parse_failures
                  << " items had unparseable sort replies and will be "
                     "missing from the ranking map\n";
      }
      rankings = to_ranking_map(run.rankings);
    }

    PatternRunOptions pattern_options;
    pattern_options.use_model_top1 = use_model_top1;

    std::vector<CoverageResult> results;
    auto run_goal = [&](PatternGoal g) {
      PlacementSpec spec = placement_for(g, n);
      if (g == PatternGoal::amplify) {
        results.push_back(amplify_experiment(client, common.model, dataset,
                                             rankings, spec, &gap_report,
                                             options, pattern_options));
      } else {
        results.push_back(mitigate_experiment(
            client, common.model, dataset, rankings, spec, budget, common.seed,
            &gap_report, options, pattern_options));
      }
    };
    if (goal == "amplify" || goal == "both") run_goal(PatternGoal::amplify);
    if (goal == "mitigate" || goal == "both") run_goal(PatternGoal::mitigate);

    RunConfig config = record_config(common, budget.to_string());
    config.set("goal", goal);
    if (!placement_text.empty()) config.set("placement", placement_text);
    if (!family.empty()) config.set("family", family);
    config.set("use_model_top1", use_model_top1 ? "true" : "false");
    ReportBundle bundle = bundle_pattern(results, config, client.cache_stats());
    print_bundle(bundle);
    write_bundle(bundle, "pattern-" + dataset.task_id, common);
    return 0;
  }
};

struct CalibrateCmd {
  CommonArgs common;
  std::string method = "majority-vote";
  int k = 10;
  bool include_identity = false;

  int run() {
    Dataset dataset = load_required_dataset(common);
    RunOptions options = make_run_options(common);
    CompletionClient client = make_client(common);
    CalibrationConfig config;
    config.method = calibration_method_from(method);
    config.k = k;
    config.seed = common.seed;
    config.include_identity = include_identity;
    CalibratedResult result =
        calibrated_evaluate(client, common.model, dataset, config, options);
    std::string budget_str =
        config.method == CalibrationMethod::majority_vote ? std::to_string(k)
                                                          : "1";
    RunConfig record = record_config(common, budget_str);
    record.set("method", to_string(config.method));
    record.set("k", std::to_string(k));
    record.set("include_identity", include_identity ? "true" : "false");
    ReportBundle bundle =
        bundle_calibration(result, record, client.cache_stats());
    print_bundle(bundle);
    write_bundle(bundle, "calibration-" + dataset.task_id, common);
    return 0;
  }
};

struct PaperCheckCmd {
  CommonArgs common;
  bool write_file = false;

  int run() {
    PaperCheckTable table = paper_check();
    RunConfig config;
    config.set("tool_version", kVersion);
    config.set("mode", "paper-check");
    ReportBundle bundle = bundle_paper_check(table, config);
    print_bundle(bundle);
    if (write_file) write_bundle(bundle, "paper-check", common);
    return table.anomalies == 2 ? 0 : 1;
  }
};

struct ReportCmd {
  CommonArgs common;
  std::vector<std::string> inputs;
  bool correlate = false;
  std::string reference_model;

  int run_correlate() {
    std::vector<std::pair<double, double>> pairs;
    if (!reference_model.empty()) {
      pairs = reference_gap_error_pairs(reference_model);
    } else {
      if (inputs.size() < 3) {
        throw ConfigError(
            "--correlate needs at least three sensitivity reports (or "
            "--reference-pairs)");
      }
      for (const auto& input : inputs) {
        SensitivityReport report =
            sensitivity_from_bundle(load_bundle(input));
        pairs.emplace_back(report.gap, 100.0 - report.vanilla_acc);
      }
    }
    double r = sensitivity_correlation(pairs);
    std::cout << "pairs (gap, error_rate):\n";
    for (const auto& [gap, error] : pairs) {
      std::cout << "  " << gap << ", " << error << "\n";
    }
    std::cout << "pearson_r " << std::setprecision(17) << r << "\n";
    if (common.out_dir != "reports" || correlate) {
      std::filesystem::path path =
          std::filesystem::path(common.out_dir) / "correlation-pairs.csv";
      std::filesystem::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open " + path.string());
      out << "gap,error_rate\n";
      char buf[80];
      for (const auto& [gap, error] : pairs) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", gap, error);
        out << buf;
      }
      std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
  }

  int run() {
    if (correlate || !reference_model.empty()) return run_correlate();
    if (inputs.empty()) {
      throw ConfigError("report needs input bundle paths (or --correlate)");
    }
    for (const auto& input : inputs) {
      ReportBundle bundle = load_bundle(input);
      std::string stem = std::filesystem::path(input).stem().string();
      write_bundle(bundle, stem, common);
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Measures and calibrates how sensitive multiple-choice QA models are "
      "to the order of the answer options"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  EvaluateCmd evaluate;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "Accuracy under the original option order");
  add_config_flag(evaluate_cmd, evaluate.common);
  add_model_flags(evaluate_cmd, evaluate.common);
  add_fewshot_flags(evaluate_cmd, evaluate.common);

  SensitivityCmd sensitivity;
  CLI::App* sensitivity_cmd = app.add_subcommand(
      "sensitivity", "Best/worst-case accuracy over option orderings");
  add_config_flag(sensitivity_cmd, sensitivity.common);
  add_model_flags(sensitivity_cmd, sensitivity.common);
  add_fewshot_flags(sensitivity_cmd, sensitivity.common);
  add_output_flags(sensitivity_cmd, sensitivity.common);
  sensitivity_cmd->add_option("--budget", sensitivity.common.budget,
                              "Orderings per item: exhaustive or a count");
  sensitivity_cmd->add_flag("--self-verify", sensitivity.self_verify,
                            "Also ask the model to flag uncertain items");

  SortEvalCmd sort_eval;
  CLI::App* sort_eval_cmd = app.add_subcommand(
      "sort-eval", "Option ranking quality (Hits@k, top-k reduction)");
  add_config_flag(sort_eval_cmd, sort_eval.common);
  add_model_flags(sort_eval_cmd, sort_eval.common);
  add_output_flags(sort_eval_cmd, sort_eval.common);
  sort_eval_cmd->add_option("--save-rankings", sort_eval.save_rankings_path,
                            "Also write the raw rankings (JSONL)");

  PatternsCmd patterns;
  CLI::App* patterns_cmd = app.add_subcommand(
      "patterns", "Top-2 placement patterns that widen or shrink the gap");
  add_config_flag(patterns_cmd, patterns.common);
  add_model_flags(patterns_cmd, patterns.common);
  add_output_flags(patterns_cmd, patterns.common);
  patterns_cmd->add_option("--budget", patterns.common.budget,
                           "Filler-ordering search budget for mitigation");
  patterns_cmd->add_option("--goal", patterns.goal,
                           "amplify, mitigate, or both")
      ->check(CLI::IsMember({"amplify", "mitigate", "both"}));
  patterns_cmd->add_option("--placement", patterns.placement_text,
                           "Top-2 display positions, e.g. AE or 0,4");
  patterns_cmd->add_option("--family", patterns.family,
                           "Preset placements: gpt4-like or instruct-like")
      ->check(CLI::IsMember({"gpt4-like", "instruct-like"}));
  patterns_cmd->add_option("--gap-report", patterns.gap_report_path,
                           "Sensitivity report supplying vanilla and gap");
  patterns_cmd->add_option("--rankings", patterns.rankings_path,
                           "Precomputed rankings (JSONL from sort-eval)");
  patterns_cmd->add_flag("--use-model-top1", patterns.use_model_top1,
                         "Treat the model's top-ranked option as top-1");

  CalibrateCmd calibrate;
  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "Order-robust prediction (majority vote or "
                   "explanation-first)");
  add_config_flag(calibrate_cmd, calibrate.common);
  add_model_flags(calibrate_cmd, calibrate.common);
  add_output_flags(calibrate_cmd, calibrate.common);
  calibrate_cmd->add_option("--method", calibrate.method,
                            "majority-vote or mec");
  calibrate_cmd->add_option("--k", calibrate.k,
                            "Reorders per item for majority vote");
  calibrate_cmd->add_flag("--include-identity", calibrate.include_identity,
                          "Force the identity order into the reorders");

  PaperCheckCmd paper_check_args;
  CLI::App* paper_check_cmd = app.add_subcommand(
      "paper-check", "Re-derive the published coverage table from embedded "
                     "reference numbers (offline)");
  add_config_flag(paper_check_cmd, paper_check_args.common);
  add_output_flags(paper_check_cmd, paper_check_args.common);
  paper_check_cmd->add_flag("--write", paper_check_args.write_file,
                            "Also write the table as a report bundle");

  ReportCmd report;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "Re-render emitted bundles; correlate sensitivity reports");
  add_config_flag(report_cmd, report.common);
  add_output_flags(report_cmd, report.common);
  report_cmd->add_option("inputs", report.inputs, "Bundle files (JSONL)");
  report_cmd->add_flag("--correlate", report.correlate,
                       "Pearson r over (gap, error-rate) pairs from "
                       "sensitivity bundles");
  report_cmd->add_option("--reference-pairs", report.reference_model,
                         "Use the embedded reference pairs for this model "
                         "(GPT-4 or InstructGPT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (evaluate_cmd->parsed()) {
      apply_config_file(evaluate_cmd, evaluate.common);
      return evaluate.run();
    }
    if (sensitivity_cmd->parsed()) {
      apply_config_file(sensitivity_cmd, sensitivity.common);
      return sensitivity.run();
    }
    if (sort_eval_cmd->parsed()) {
      apply_config_file(sort_eval_cmd, sort_eval.common);
      return sort_eval.run();
    }
    if (patterns_cmd->parsed()) {
      apply_config_file(patterns_cmd, patterns.common,
                        {{"goal", &patterns.goal},
                         {"placement", &patterns.placement_text},
                         {"family", &patterns.family}});
      return patterns.run();
    }
    if (calibrate_cmd->parsed()) {
      apply_config_file(calibrate_cmd, calibrate.common,
                        {{"method", &calibrate.method}});
      return calibrate.run();
    }
    if (paper_check_cmd->parsed()) {
      apply_config_file(paper_check_cmd, paper_check_args.common);
      return paper_check_args.run();
    }
    if (report_cmd->parsed()) {
      apply_config_file(report_cmd, report.common);
      return report.run();
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
