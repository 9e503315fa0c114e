// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "mcqorder/simulated.hpp"
#include "mcqorder/types.hpp"

namespace mcqorder {

/// Recipe for a synthetic benchmark with a matching simulated model.
///
/// Every item gets gold utility 1.0 and a runner-up at 1.0 - margin; the
/// remaining options trail at 0.5 and below. A configurable fraction of
/// items is "uncertain": their margin falls in (0.2*delta, 0.8*delta), so a
/// positional bias of delta can flip them, while the rest get margins in
/// (1.5*delta, 3*delta) that no single delta-bump can overcome.
struct SuiteConfig {
  int item_count = 200;
  std::vector<int> option_counts = {4};  // cycled over items
  double uncertain_frac = 0.3;
  double delta = 0.05;
  double theta = 0.05;          // self-verification threshold of the model
  std::vector<double> bias;     // positional bias; empty = unbiased
  std::uint64_t seed = 0;
};

struct GeneratedSuite {
  Dataset dataset;
  SimulatedModel model;
  std::vector<bool> uncertain;  // parallel to dataset.items
};

/// Deterministic in config.seed. Guarantees: gold utility is the unique
/// maximum for every item; exactly round(uncertain_frac * item_count) items
/// are uncertain; option texts are unique per item so the model's utility
/// table has no collisions.
GeneratedSuite generate_suite(const SuiteConfig& config);

}  // namespace mcqorder
