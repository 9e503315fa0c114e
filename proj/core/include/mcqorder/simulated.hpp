// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mcqorder/types.hpp"

namespace mcqorder {

/// Display position chosen by a utility-plus-positional-bias scorer:
/// argmax over positions p of utilities[perm[p]] + bias[p], earliest
/// position on ties. bias shorter than n is zero-extended.
int simulated_predict(const std::vector<double>& utilities, const std::vector<double>& bias,
                      const Ordering& ordering);

/// Canonical indices sorted by utility, highest first, ties toward the
/// lower canonical index.
std::vector<int> simulated_sort_ranking(const std::vector<double>& utilities);

/// True when the top-two utility margin is below theta, i.e. the scorer
/// would call more than one choice highly probable.
bool simulated_self_verify(const std::vector<double>& utilities, double theta);

/// Deterministic hash of (salt, question, option) into [0, 1).
double hash01(std::uint64_t salt, const std::string& question, const std::string& option);

/// A fully specified stand-in model: per-option utilities keyed by question
/// and option text, a positional bias vector, and a self-verification
/// threshold. Keying utilities by option text (not index) keeps lookups
/// working after options are reordered or dropped.
class SimulatedModel {
 public:
  SimulatedModel() = default;

  /// Procedural model: utilities are hashed from the question and option
  /// texts, so any dataset works without registration.
  static SimulatedModel procedural(std::uint64_t salt, std::vector<double> bias, double theta);

  /// The built-in demo model behind the "simulated:demo" model id.
  static SimulatedModel demo();

  void set_bias(std::vector<double> bias) { bias_ = std::move(bias); }
  void set_theta(double theta) { theta_ = theta; }
  const std::vector<double>& bias() const { return bias_; }
  double theta() const { return theta_; }
  double bias_at(int position) const;

  /// Registers explicit utilities for one question. Re-registering the same
  /// (question, option) with a different utility is a ConfigError.
  void register_item(const std::string& question, const std::vector<std::string>& options,
                     const std::vector<double>& utilities);

  bool knows(const std::string& question) const;

  /// Utility for one option of a question. Falls back to the procedural
  /// hash if this model is procedural; otherwise an unknown (question,
  /// option) is a ConfigError.
  double utility(const std::string& question, const std::string& option) const;

  /// Utilities for a whole option list, in the given order.
  std::vector<double> utilities_for(const std::string& question,
                                    const std::vector<std::string>& options) const;

  size_t registered_count() const { return table_.size(); }

 private:
  std::vector<double> bias_;
  double theta_ = 0.0;
  bool procedural_ = false;
  std::uint64_t salt_ = 0;
  std::map<std::string, std::map<std::string, double>> table_;
};

/// JSON round-trip: {"bias": [...], "theta": x,
///                   "items": [{"question", "options", "utilities"}, ...]}.
SimulatedModel load_simulated_spec(const std::filesystem::path& path);
void save_simulated_spec(const SimulatedModel& model, const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::vector<std::string>>>&
                             item_keys);

/// Produces completion text for a rendered prompt by recovering the target
/// question and displayed options from the prompt itself, then scoring them
/// with a SimulatedModel. Markers are searched globally; demonstration
/// blocks are plain answer prompts, so sort/verification/explanation
/// markers only ever come from the target template.
class SimulatedResponder {
 public:
  explicit SimulatedResponder(SimulatedModel model) : model_(std::move(model)) {}

  std::string respond(const std::string& prompt) const;
  const SimulatedModel& model() const { return model_; }

 private:
  SimulatedModel model_;
};

}  // namespace mcqorder
