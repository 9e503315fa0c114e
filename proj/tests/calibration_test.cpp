// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/calibration.hpp"

#include <gtest/gtest.h>

#include "mcqorder/orderings.hpp"
#include "mcqorder/suite.hpp"
#include "test_util.hpp"

namespace mcqorder {
namespace {

using testing::ScratchDir;
using testing::make_dataset;
using testing::make_item;

SimulatedModel marginal_model() {
  SimulatedModel model;
  model.set_bias({0.2, 0.0, 0.0});
  model.register_item("Pick.", {"x", "y", "z"}, {2.0, 1.9, 0.5});
  return model;
}

TEST(CalibrationMethodNames, ParseAndPrint) {
  EXPECT_EQ(calibration_method_from("majority-vote"),
            CalibrationMethod::majority_vote);
  EXPECT_EQ(calibration_method_from("vote"), CalibrationMethod::majority_vote);
  EXPECT_EQ(calibration_method_from("mec"), CalibrationMethod::mec);
  EXPECT_EQ(calibration_method_from("explanation-first"),
            CalibrationMethod::mec);
  EXPECT_THROW(calibration_method_from("oracle"), ConfigError);
  EXPECT_EQ(to_string(CalibrationMethod::majority_vote), "majority-vote");
  EXPECT_EQ(to_string(CalibrationMethod::mec), "mec");
}

TEST(MajorityVote, FullEnumerationOutvotesTheBias) {
  // Across all six orderings the runner-up only wins when seated at the
  // biased front position: tally 4 to 2 for the true answer.
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:example", marginal_model());
  MCQItem item = make_item("q1", "Pick.", {"x", "y", "z"}, 0);
  VoteOutcome outcome = majority_vote_predict(client, "lab:example", item, 6,
                                              3, true, RunOptions{});
  ASSERT_TRUE(outcome.prediction.has_value());
  EXPECT_EQ(outcome.prediction->canonical_index, 0);
  EXPECT_EQ(outcome.tally.at(0), 4);
  EXPECT_EQ(outcome.tally.at(1), 2);
  EXPECT_EQ(outcome.non_votes, 0);
}

TEST(MajorityVote, KIsClampedToTheOrderingCount) {
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:example", marginal_model());
  MCQItem item = make_item("q1", "Pick.", {"x", "y", "z"}, 0);
  VoteOutcome outcome = majority_vote_predict(client, "lab:example", item, 500,
                                              3, true, RunOptions{});
  int total_votes = 0;
  for (const auto& [index, votes] : outcome.tally) total_votes += votes;
  EXPECT_EQ(total_votes, 6);
}

TEST(MajorityVote, SingleReorderWithIdentityIsTheVanillaAnswer) {
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:example", marginal_model());
  MCQItem item = make_item("q1", "Pick.", {"x", "y", "z"}, 0);
  VoteOutcome outcome = majority_vote_predict(client, "lab:example", item, 1,
                                              99, true, RunOptions{});
  ASSERT_TRUE(outcome.prediction.has_value());
  EXPECT_EQ(outcome.prediction->canonical_index, 0);
}

TEST(MajorityVote, TieBreaksToTheFirstSampledOrdering) {
  // Two options, one swap: each collects one vote. The first sampled
  // ordering is the identity, whose prediction is the front option.
  SimulatedModel model;
  model.set_bias({0.05, 0.0});
  model.register_item("Two.", {"x", "y"}, {1.0, 0.99});
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:two", std::move(model));
  MCQItem item = make_item("q1", "Two.", {"x", "y"}, 0);
  VoteOutcome outcome =
      majority_vote_predict(client, "lab:two", item, 2, 0, true, RunOptions{});
  ASSERT_TRUE(outcome.prediction.has_value());
  EXPECT_EQ(outcome.tally.at(0), 1);
  EXPECT_EQ(outcome.tally.at(1), 1);
  EXPECT_EQ(outcome.prediction->canonical_index, 0);
}

TEST(MecPredict, ReadsOnlyTheFinalAnswerLine) {
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:example", marginal_model());
  MCQItem item = make_item("q1", "Pick.", {"x", "y", "z"}, 0);
  MecOutcome outcome = mec_predict(client, "lab:example", item, RunOptions{});
  ASSERT_TRUE(outcome.prediction.has_value());
  EXPECT_EQ(outcome.prediction->canonical_index, 0);
  EXPECT_FALSE(outcome.explanation.empty());
  EXPECT_EQ(outcome.prediction->rule, ParseRule::answer_line);
}

TEST(MecPredict, ReplyWithoutAnAnswerLineIsAnAbstention) {
  // Pre-seed the cache with a reply that never commits to a letter; the
  // client then serves it without any backend.
  ScratchDir scratch;
  MCQItem item = make_item("q1", "Pick.", {"x", "y", "z"}, 0);
  RunOptions options;
  std::string prompt = render_mec_prompt(
      options.templates, apply_ordering(item, Ordering::identity(3)));
  ModelRequest request{"canned-model", prompt, options.mec_max_tokens,
                       options.temperature};
  {
    ResponseCache cache(scratch.path());
    cache.store(request, "Every choice has something going for it.");
  }
  ClientConfig config;
  config.cache_dir = scratch.path();
  CompletionClient client(config);
  MecOutcome outcome = mec_predict(client, "canned-model", item, RunOptions{});
  EXPECT_FALSE(outcome.prediction.has_value());
  EXPECT_EQ(outcome.raw, "Every choice has something going for it.");
}

TEST(MecPredict, CannedAnswerLineMapsThroughTheIdentity) {
  ScratchDir scratch;
  MCQItem item = make_item("q1", "Pick.", {"x", "y", "z"}, 0);
  RunOptions options;
  std::string prompt = render_mec_prompt(
      options.templates, apply_ordering(item, Ordering::identity(3)));
  ModelRequest request{"canned-model", prompt, options.mec_max_tokens,
                       options.temperature};
  {
    ResponseCache cache(scratch.path());
    cache.store(request, "B is supported by the premise.\nAnswer: B");
  }
  ClientConfig config;
  config.cache_dir = scratch.path();
  CompletionClient client(config);
  MecOutcome outcome = mec_predict(client, "canned-model", item, RunOptions{});
  ASSERT_TRUE(outcome.prediction.has_value());
  EXPECT_EQ(outcome.prediction->canonical_index, 1);
  EXPECT_EQ(outcome.explanation, "B is supported by the premise.");
}

TEST(CalibratedEvaluate, UnbiasedSuiteIsPerfectEitherWay) {
  SuiteConfig suite_config;
  suite_config.item_count = 12;
  suite_config.seed = 51;
  GeneratedSuite suite = generate_suite(suite_config);
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:suite", suite.model);
  for (CalibrationMethod method :
       {CalibrationMethod::majority_vote, CalibrationMethod::mec}) {
    CalibrationConfig config;
    config.method = method;
    config.k = 5;
    config.seed = 2;
    CalibratedResult result = calibrated_evaluate(client, "lab:suite",
                                                  suite.dataset, config,
                                                  RunOptions{});
    EXPECT_DOUBLE_EQ(result.accuracy_pct, 100.0) << to_string(method);
    EXPECT_DOUBLE_EQ(result.delta_vs_vanilla, 0.0) << to_string(method);
    EXPECT_EQ(result.abstentions, 0) << to_string(method);
    EXPECT_EQ(result.total, 12) << to_string(method);
  }
}

TEST(CalibratedEvaluate, VotesAreRecordedPerItem) {
  SuiteConfig suite_config;
  suite_config.item_count = 6;
  suite_config.seed = 52;
  GeneratedSuite suite = generate_suite(suite_config);
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:suite", suite.model);
  CalibrationConfig config;
  config.k = 4;
  CalibratedResult result = calibrated_evaluate(client, "lab:suite",
                                                suite.dataset, config,
                                                RunOptions{});
  ASSERT_EQ(result.votes_per_item.size(), 6u);
  for (const auto& tally : result.votes_per_item) {
    int votes = 0;
    for (const auto& [index, count] : tally) votes += count;
    EXPECT_EQ(votes, 4);
  }
}

TEST(CalibratedEvaluate, VanillaOverrideAnchorsTheDelta) {
  SuiteConfig suite_config;
  suite_config.item_count = 8;
  suite_config.seed = 53;
  GeneratedSuite suite = generate_suite(suite_config);
  CompletionClient client(ClientConfig{});
  client.register_simulated("lab:suite", suite.model);
  CalibrationConfig config;
  config.k = 3;
  CalibratedResult result = calibrated_evaluate(client, "lab:suite",
                                                suite.dataset, config,
                                                RunOptions{}, 40.0);
  EXPECT_DOUBLE_EQ(result.vanilla_acc, 40.0);
  EXPECT_DOUBLE_EQ(result.delta_vs_vanilla, result.accuracy_pct - 40.0);
}

}  // namespace
}  // namespace mcqorder
