// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/simulated.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "mcqorder/orderings.hpp"
#include "mcqorder/prompting.hpp"
#include "test_util.hpp"

namespace mcqorder {
namespace {

using testing::ScratchDir;
using testing::make_item;

TEST(SimulatedPredict, BiasCanOvercomeASmallMargin) {
  // Scores under identity: 2.2, 1.9, 0.5.
  std::vector<double> u = {2.0, 1.9, 0.5};
  std::vector<double> b = {0.2, 0.0, 0.0};
  EXPECT_EQ(simulated_predict(u, b, Ordering::identity(3)), 0);
  // Option 1 at position 0 scores 2.1 vs option 0's 2.0: the bias flips it.
  EXPECT_EQ(simulated_predict(u, b, Ordering({1, 0, 2})), 0);
}

TEST(SimulatedPredict, ExactlyTwoOfSixOrderingsFlipTheExample) {
  std::vector<double> u = {2.0, 1.9, 0.5};
  std::vector<double> b = {0.2, 0.0, 0.0};
  int flipped = 0;
  for (const auto& ordering : enumerate_orderings(3)) {
    int position = simulated_predict(u, b, ordering);
    if (ordering.canonical_at(position) == 1) ++flipped;
  }
  EXPECT_EQ(flipped, 2);
}

TEST(SimulatedPredict, ZeroBiasIsOrderInvariant) {
  std::vector<double> u = {2.0, 1.9, 0.5};
  for (const auto& ordering : enumerate_orderings(3)) {
    int position = simulated_predict(u, {}, ordering);
    EXPECT_EQ(ordering.canonical_at(position), 0)
        << "zero bias must always pick the utility argmax";
  }
}

TEST(SimulatedPredict, TieBreaksToTheEarlierPosition) {
  std::vector<double> u = {1.0, 1.0, 0.0};
  EXPECT_EQ(simulated_predict(u, {}, Ordering::identity(3)), 0);
  // Swap the tied options: position 0 still wins.
  EXPECT_EQ(simulated_predict(u, {}, Ordering({1, 0, 2})), 0);
}

TEST(SimulatedPredict, DimensionMismatchThrows) {
  EXPECT_THROW(simulated_predict({1.0, 2.0}, {}, Ordering::identity(3)),
               DimensionMismatch);
}

TEST(SimulatedSortRanking, DescendingUtilities) {
  EXPECT_EQ(simulated_sort_ranking({2.0, 1.9, 0.5}),
            (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(simulated_sort_ranking({0.5, 2.0, 1.9}),
            (std::vector<int>{1, 2, 0}));
}

TEST(SimulatedSortRanking, MatchesABruteForceSortOracle) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);
    std::vector<double> u(n);
    for (auto& x : u) x = dist(rng);
    std::vector<int> expected(u.size());
    for (size_t i = 0; i < u.size(); ++i) expected[i] = static_cast<int>(i);
    std::stable_sort(expected.begin(), expected.end(),
                     [&](int a, int b) { return u[a] > u[b]; });
    EXPECT_EQ(simulated_sort_ranking(u), expected);
  }
}

TEST(SimulatedSelfVerify, ThresholdOnTheTopTwoMargin) {
  EXPECT_TRUE(simulated_self_verify({2.0, 1.9, 0.5}, 0.2));
  EXPECT_FALSE(simulated_self_verify({3.0, 1.0, 0.0}, 0.5));
}

TEST(Hash01, DeterministicAndInRange) {
  double a = hash01(1, "q", "x");
  EXPECT_EQ(a, hash01(1, "q", "x"));
  EXPECT_NE(a, hash01(2, "q", "x"));
  EXPECT_NE(a, hash01(1, "q", "y"));
  for (int i = 0; i < 1000; ++i) {
    double v = hash01(7, "question " + std::to_string(i), "opt");
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(SimulatedModel, RegisteredUtilitiesSurviveReordering) {
  SimulatedModel model;
  model.register_item("q?", {"x", "y", "z"}, {0.1, 0.9, 0.5});
  EXPECT_EQ(model.utility("q?", "y"), 0.9);
  // Text-keyed: a reordered or reduced option list still resolves.
  auto reordered = model.utilities_for("q?", {"z", "x"});
  EXPECT_EQ(reordered, (std::vector<double>{0.5, 0.1}));
}

TEST(SimulatedModel, ConflictingReRegistrationThrows) {
  SimulatedModel model;
  model.register_item("q?", {"x", "y"}, {0.1, 0.9});
  EXPECT_THROW(model.register_item("q?", {"x"}, {0.2}), ConfigError);
  EXPECT_NO_THROW(model.register_item("q?", {"x"}, {0.1}));
}

TEST(SimulatedModel, UnknownQuestionThrowsUnlessProcedural) {
  SimulatedModel table_only;
  table_only.register_item("known?", {"x", "y"}, {0.1, 0.9});
  EXPECT_THROW(table_only.utility("unknown?", "x"), ConfigError);
  SimulatedModel procedural = SimulatedModel::procedural(5, {}, 0.1);
  EXPECT_NO_THROW(procedural.utility("unknown?", "x"));
}

TEST(SimulatedSpec, JsonRoundTrip) {
  ScratchDir scratch;
  SimulatedModel model;
  model.set_bias({0.1, 0.0, -0.05});
  model.set_theta(0.07);
  model.register_item("q1?", {"x", "y", "z"}, {0.2, 0.9, 0.4});
  model.register_item("q2?", {"p", "q"}, {0.6, 0.3});
  auto path = scratch.path() / "model.json";
  save_simulated_spec(model, path,
                      {{"q1?", {"x", "y", "z"}}, {"q2?", {"p", "q"}}});
  SimulatedModel loaded = load_simulated_spec(path);
  EXPECT_EQ(loaded.bias(), model.bias());
  EXPECT_EQ(loaded.theta(), model.theta());
  EXPECT_EQ(loaded.utility("q1?", "y"), 0.9);
  EXPECT_EQ(loaded.utility("q2?", "p"), 0.6);
}

class ResponderTest : public ::testing::Test {
 protected:
  ResponderTest() {
    model_.set_bias({0.2, 0.0, 0.0});
    model_.set_theta(0.15);
    model_.register_item("Pick the best.", {"x", "y", "z"}, {2.0, 1.9, 0.5});
    responder_ = std::make_unique<SimulatedResponder>(model_);
    item_ = make_item("q1", "Pick the best.", {"x", "y", "z"}, 0);
  }

  OrderedItem ordered(const Ordering& ordering) const {
    return apply_ordering(item_, ordering);
  }

  SimulatedModel model_;
  std::unique_ptr<SimulatedResponder> responder_;
  MCQItem item_;
};

TEST_F(ResponderTest, AnswerPromptYieldsBiasedArgmaxLetter) {
  std::string prompt = render_mcq_prompt(TemplateSet::defaults(),
                                         ordered(Ordering::identity(3)));
  EXPECT_EQ(responder_->respond(prompt), "Answer: A");
  // Under [y, x, z] the bias holds position 0: y scores 1.9+0.2 = 2.1 > 2.0.
  std::string swapped = render_mcq_prompt(TemplateSet::defaults(),
                                          ordered(Ordering({1, 0, 2})));
  EXPECT_EQ(responder_->respond(swapped), "Answer: A");
}

TEST_F(ResponderTest, ResponseMatchesSimulatedPredictUnderEveryOrdering) {
  for (const auto& ordering : enumerate_orderings(3)) {
    std::string prompt =
        render_mcq_prompt(TemplateSet::defaults(), ordered(ordering));
    std::string reply = responder_->respond(prompt);
    int expected =
        simulated_predict({2.0, 1.9, 0.5}, {0.2, 0.0, 0.0}, ordering);
    EXPECT_EQ(reply, std::string("Answer: ") + letter_for(expected));
  }
}

TEST_F(ResponderTest, SortPromptRanksByUtility) {
  // Display [z, x, y]: utilities 0.5, 2.0, 1.9 -> display order B, C, A.
  std::string prompt = render_sort_prompt(TemplateSet::defaults(),
                                          ordered(Ordering({2, 0, 1})));
  EXPECT_EQ(responder_->respond(prompt), "B, C, A");
}

TEST_F(ResponderTest, VerificationPromptComparesMarginToTheta) {
  std::string prompt = render_self_verification_prompt(
      TemplateSet::defaults(), ordered(Ordering::identity(3)));
  EXPECT_EQ(responder_->respond(prompt), "yes");  // margin 0.1 < 0.15
  SimulatedModel confident = model_;
  confident.set_theta(0.05);
  SimulatedResponder strict(confident);
  EXPECT_EQ(strict.respond(prompt), "no");
}

TEST_F(ResponderTest, ExplanationPromptEndsWithAnswerLine) {
  std::string prompt = render_mec_prompt(TemplateSet::defaults(),
                                         ordered(Ordering::identity(3)));
  std::string reply = responder_->respond(prompt);
  auto newline = reply.rfind('\n');
  ASSERT_NE(newline, std::string::npos);
  EXPECT_EQ(reply.substr(newline + 1), "Answer: A");
  EXPECT_FALSE(reply.substr(0, newline).empty());
}

}  // namespace
}  // namespace mcqorder
