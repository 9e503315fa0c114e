// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/simulated.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace mcqorder {

namespace {

std::uint64_t fnv1a(std::uint64_t state, const std::string& data) {
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  for (const char c : data) {
    state ^= static_cast<unsigned char>(c);
    state *= kPrime;
  }
  return state;
}

}  // namespace

int simulated_predict(const std::vector<double>& utilities, const std::vector<double>& bias,
                      const Ordering& ordering) {
  const int n = ordering.size();
  if (static_cast<int>(utilities.size()) != n) {
    throw DimensionMismatch("utilities size " + std::to_string(utilities.size()) +
                            " does not match ordering size " + std::to_string(n));
  }
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < n; ++p) {
    const double b = p < static_cast<int>(bias.size()) ? bias[static_cast<size_t>(p)] : 0.0;
    const double score = utilities[static_cast<size_t>(ordering.canonical_at(p))] + b;
    if (score > best_score) {
      best_score = score;
      best = p;
    }
  }
  return best;
}

std::vector<int> simulated_sort_ranking(const std::vector<double>& utilities) {
  std::vector<int> indices(utilities.size());
  std::iota(indices.begin(), indices.end(), 0);
  std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
    return utilities[static_cast<size_t>(a)] > utilities[static_cast<size_t>(b)];
  });
  return indices;
}

bool simulated_self_verify(const std::vector<double>& utilities, double theta) {
  if (utilities.size() < 2) {
    throw DimensionMismatch("self-verification needs at least two utilities");
  }
  double top = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (const double u : utilities) {
    if (u > top) {
      second = top;
      top = u;
    } else if (u > second) {
      second = u;
    }
  }
  return (top - second) < theta;
}

double hash01(std::uint64_t salt, const std::string& question, const std::string& option) {
  std::uint64_t state = 0xcbf29ce484222325ULL ^ salt;
  state = fnv1a(state, question);
  state = fnv1a(state, std::string(1, '\x1f'));
  state = fnv1a(state, option);
  // 53 bits of the hash give a double uniform over [0, 1).
  return static_cast<double>(state >> 11) / 9007199254740992.0;
}

SimulatedModel SimulatedModel::procedural(std::uint64_t salt, std::vector<double> bias,
                                          double theta) {
  SimulatedModel model;
  model.procedural_ = true;
  model.salt_ = salt;
  model.bias_ = std::move(bias);
  model.theta_ = theta;
  return model;
}

SimulatedModel SimulatedModel::demo() {
  return procedural(0x6d63716f72646572ULL, {0.08, 0.0, 0.0, -0.04}, 0.08);
}

double SimulatedModel::bias_at(int position) const {
  if (position < 0) throw PositionOutOfRange("negative position");
  if (position >= static_cast<int>(bias_.size())) return 0.0;
  return bias_[static_cast<size_t>(position)];
}

void SimulatedModel::register_item(const std::string& question,
                                   const std::vector<std::string>& options,
                                   const std::vector<double>& utilities) {
  if (options.size() != utilities.size()) {
    throw DimensionMismatch("options/utilities size mismatch for question: " + question);
  }
  auto& row = table_[question];
  for (size_t i = 0; i < options.size(); ++i) {
    const auto [it, inserted] = row.emplace(options[i], utilities[i]);
    if (!inserted && it->second != utilities[i]) {
      throw ConfigError("conflicting utility for option '" + options[i] + "' of question: " +
                        question);
    }
  }
}

bool SimulatedModel::knows(const std::string& question) const {
  return table_.count(question) != 0;
}

double SimulatedModel::utility(const std::string& question, const std::string& option) const {
  const auto row = table_.find(question);
  if (row != table_.end()) {
    const auto cell = row->second.find(option);
    if (cell != row->second.end()) return cell->second;
  }
  if (procedural_) return hash01(salt_, question, option);
  throw ConfigError("simulated model has no utility for option '" + option +
                    "' of question: " + question);
}

std::vector<double> SimulatedModel::utilities_for(
    const std::string& question, const std::vector<std::string>& options) const {
  std::vector<double> out;
  out.reserve(options.size());
  for (const auto& option : options) out.push_back(utility(question, option));
  return out;
}

SimulatedModel load_simulated_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open simulated model spec: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid simulated model spec " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("items") || !j["items"].is_array()) {
    throw ConfigError("simulated model spec must be an object with an 'items' array");
  }
  SimulatedModel model;
  if (j.contains("bias")) {
    model.set_bias(j["bias"].get<std::vector<double>>());
  }
  if (j.contains("theta")) {
    model.set_theta(j["theta"].get<double>());
  }
  for (const auto& entry : j["items"]) {
    if (!entry.contains("question") || !entry.contains("options") ||
        !entry.contains("utilities")) {
      throw ConfigError("simulated model spec item needs question/options/utilities");
    }
    model.register_item(entry["question"].get<std::string>(),
                        entry["options"].get<std::vector<std::string>>(),
                        entry["utilities"].get<std::vector<double>>());
  }
  return model;
}

void save_simulated_spec(const SimulatedModel& model, const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::vector<std::string>>>&
                             item_keys) {
  nlohmann::ordered_json j;
  j["bias"] = model.bias();
  j["theta"] = model.theta();
  j["items"] = nlohmann::json::array();
  for (const auto& [question, options] : item_keys) {
    nlohmann::ordered_json entry;
    entry["question"] = question;
    entry["options"] = options;
    entry["utilities"] = model.utilities_for(question, options);
    j["items"].push_back(entry);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write simulated model spec: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing simulated model spec: " + path.string());
}

namespace {

struct PromptView {
  std::string question;
  std::vector<std::string> options;
  bool explanation_tail = false;
};

/// Recovers the target question and displayed options from a rendered
/// prompt. Few-shot prompts contain several blocks; the target is the last.
PromptView parse_prompt(const std::string& prompt) {
  PromptView view;
  constexpr const char kAnswerTail[] = ". Answer:";
  constexpr const char kExplanationTail[] = ". Explanation:";
  std::string body;
  if (prompt.size() >= sizeof(kExplanationTail) - 1 &&
      prompt.compare(prompt.size() - (sizeof(kExplanationTail) - 1),
                     sizeof(kExplanationTail) - 1, kExplanationTail) == 0) {
    view.explanation_tail = true;
    body = prompt.substr(0, prompt.size() - (sizeof(kExplanationTail) - 1));
  } else if (prompt.size() >= sizeof(kAnswerTail) - 1 &&
             prompt.compare(prompt.size() - (sizeof(kAnswerTail) - 1),
                            sizeof(kAnswerTail) - 1, kAnswerTail) == 0) {
    body = prompt.substr(0, prompt.size() - (sizeof(kAnswerTail) - 1));
  } else {
    throw ConfigError("prompt does not end with an answer or explanation cue");
  }

  constexpr const char kQuestionMarker[] = "Question: ";
  const size_t qpos = body.rfind(kQuestionMarker);
  if (qpos == std::string::npos) throw ConfigError("prompt has no question marker");
  constexpr const char kChoicesMarker[] = ". Choices: ";
  const size_t cpos = body.find(kChoicesMarker, qpos);
  if (cpos == std::string::npos) throw ConfigError("prompt has no choices marker");
  view.question = body.substr(qpos + sizeof(kQuestionMarker) - 1,
                              cpos - qpos - (sizeof(kQuestionMarker) - 1));

  const std::string choices = body.substr(cpos + sizeof(kChoicesMarker) - 1);
  // Options are introduced by "A) ", " B) ", " C) ", ... in sequence.
  size_t start = 0;
  if (choices.compare(0, 3, "A) ") != 0) {
    throw ConfigError("choices block does not start with 'A) '");
  }
  start = 3;
  for (int next = 1; next <= kMaxOptions; ++next) {
    const std::string marker = std::string(" ") + letter_for(next) + ") ";
    const size_t mpos = choices.find(marker, start);
    if (mpos == std::string::npos) {
      view.options.push_back(choices.substr(start));
      break;
    }
    view.options.push_back(choices.substr(start, mpos - start));
    start = mpos + marker.size();
  }
  if (view.options.size() < static_cast<size_t>(kMinOptions)) {
    throw ConfigError("prompt has fewer than two choices");
  }
  return view;
}

}  // namespace

std::string SimulatedResponder::respond(const std::string& prompt) const {
  const PromptView view = parse_prompt(prompt);
  const std::vector<double> utilities = model_.utilities_for(view.question, view.options);
  const int n = static_cast<int>(view.options.size());

  if (prompt.find("Can more than one of the choices") != std::string::npos) {
    return simulated_self_verify(utilities, model_.theta()) ? "yes" : "no";
  }

  if (prompt.find("descending order of probability") != std::string::npos) {
    std::vector<int> positions(static_cast<size_t>(n));
    std::iota(positions.begin(), positions.end(), 0);
    std::stable_sort(positions.begin(), positions.end(), [&](int a, int b) {
      return utilities[static_cast<size_t>(a)] > utilities[static_cast<size_t>(b)];
    });
    std::string out;
    for (size_t i = 0; i < positions.size(); ++i) {
      if (i > 0) out += ", ";
      out += letter_for(positions[i]);
    }
    return out;
  }

  // Positional bias applies to the displayed order directly.
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < n; ++p) {
    const double score = utilities[static_cast<size_t>(p)] + model_.bias_at(p);
    if (score > best_score) {
      best_score = score;
      best = p;
    }
  }
  const char letter = letter_for(best);

  if (view.explanation_tail) {
    std::string out = "Each choice was weighed against the question in turn.";
    out += "\nAnswer: ";
    out += letter;
    return out;
  }
  return std::string("Answer: ") + letter;
}

}  // namespace mcqorder
