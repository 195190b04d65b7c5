/**
 * Copyright 2026 The corpus-denoise Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "denoise/oracle.hpp"
#include "test_support.hpp"

namespace denoise {
namespace {

using testing::single_edit;

// Tokens {0,1,2,3}; only 1 and 2 fit between two 0s, with equal priors.
WorldModel two_fit_world() {
  return testing::explicit_world({{0, 0.5, 0.5, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}},
                                 {1, 0, 0, 0});
}

ConfusionTable pair_table() {
  return ConfusionTable::from_entries(
      4, {{{1, 0.5}, {2, 0.5}}, {{2, 0.5}, {3, 0.5}}, {{1, 0.5}, {3, 0.5}}, {{0, 0.5}, {1, 0.5}}},
      ChannelShape::kUniform);
}

TEST(Posterior, NoisyEqualPriorsGivesOneNineteenth) {
  const auto w = two_fit_world();
  const auto t = pair_table();
  const auto record = single_edit({0, 1, 0}, 1, 2, 0.1);
  // 0.05 * 0.5 / (0.05 * 0.5 + 0.9 * 0.5)
  const double expected = 1.0 / (1.0 + 0.9 / 0.05);
  const auto report = posterior(w, t, record, 0, 0.1);
  EXPECT_EQ(report.category, Category::kNoisy);
  EXPECT_EQ(report.candidate_set, (std::vector<Token>{1, 2}));
  EXPECT_NEAR(report.posterior, expected, 1e-15);
  EXPECT_NEAR(report.posterior, 1.0 / 19.0, 1e-15);
  EXPECT_NEAR(brute_force_posterior(w, t, record, 0, 0.1), 1.0 / 19.0, 1e-9);
  EXPECT_NEAR(testing::enumerated_posterior(w, t, record, 0.1), 1.0 / 19.0, 1e-12);
  EXPECT_DOUBLE_EQ(report.keep_prob, 0.9);
  EXPECT_DOUBLE_EQ(report.replace_prob, 0.05);
  EXPECT_DOUBLE_EQ(report.noisy_term, 18.0);
  EXPECT_EQ(report.sigma, 0.0);
}

TEST(Posterior, TrueSampleIsExactlyOne) {
  const auto t = pair_table();
  // Only 1 fits between two 0s.
  const auto single = testing::explicit_world(
      {{0, 1, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}}, {1, 0, 0, 0});
  const auto record = single_edit({0, 1, 0}, 1, 3, 0.1);
  const auto report = posterior(single, t, record, 0, 0.1);
  EXPECT_EQ(report.category, Category::kTrue);
  EXPECT_EQ(report.posterior, 1.0);
  EXPECT_EQ(brute_force_posterior(single, t, record, 0, 0.1), 1.0);
}

TEST(Posterior, DeterministicWorldBruteForceIsOne) {
  const auto chain = testing::explicit_world({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}, {1, 0, 0});
  const auto t = ConfusionTable::from_entries(3, {{{1, 1.0}}, {{2, 1.0}}, {{0, 1.0}}},
                                              ChannelShape::kUniform);
  const auto record = single_edit({0, 1, 2, 0}, 2, 0, 0.1);
  EXPECT_EQ(brute_force_posterior(chain, t, record, 0, 0.1), 1.0);
  EXPECT_EQ(posterior(chain, t, record, 0, 0.1).posterior, 1.0);
}

TEST(Posterior, MatchesEnumerationOnRandomWorlds) {
  std::size_t true_count = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto c = testing::random_oracle_case(1000 + s);
    const auto report = posterior(c.world, c.table, c.record, 0, c.rate);
    const double reference = testing::enumerated_posterior(c.world, c.table, c.record, c.rate);
    EXPECT_NEAR(report.posterior, reference, 1e-9) << "case " << s;
    EXPECT_NEAR(brute_force_posterior(c.world, c.table, c.record, 0, c.rate), reference, 1e-12);
    EXPECT_EQ(report.category, categorize(c.record, c.world, c.table, 0).label);
    EXPECT_NEAR(report.posterior, 1.0 / (1.0 + report.noisy_term + report.sigma), 1e-12);
    if (report.category == Category::kTrue) {
      ++true_count;
      EXPECT_EQ(report.posterior, 1.0);
    }
    if (report.bound) EXPECT_LE(report.posterior, *report.bound + 1e-9);
  }
  EXPECT_GT(true_count, 0u);
}

TEST(Posterior, UniformSymmetryAcrossCandidates) {
  const auto uniform = testing::explicit_world(
      std::vector<std::vector<double>>(4, std::vector<double>(4, 0.25)));
  ConfusionConfig cc;
  cc.candidates = 3;
  const auto t = ConfusionTable::build(4, cc);
  // Observation 0 in the middle: every v in C^{-1}(0) gets the same mass.
  std::vector<double> values;
  for (Token x = 1; x < 4; ++x) {
    const auto r = single_edit({2, x, 3}, 1, 0, 0.1);
    values.push_back(brute_force_posterior(uniform, t, r, 0, 0.1));
  }
  for (double v : values) EXPECT_NEAR(v, values.front(), 1e-15);
}

TEST(Posterior, UnsupportedRecords) {
  const auto w = two_fit_world();
  const auto t = pair_table();
  CorruptionRecord multi;
  multi.clean = {0, 1, 0, 2};
  multi.corrupted = {0, 2, 0, 1};
  multi.edits = {{1, 1, 2}, {3, 2, 1}};
  try {
    posterior(w, t, multi, 0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedRecord);
  }
  // 3 -> 0 is not a confusion the world context makes reachable
  const auto unreachable = single_edit({0, 1, 0}, 1, 0, 0.1);
  EXPECT_THROW(posterior(w, t, unreachable, 0, 0.1), Error);
}

TEST(Posterior, BudgetIsEnforced) {
  WorldConfig wc;
  wc.vocab_size = 20;
  const auto w = WorldModel::build(wc);
  ConfusionConfig cc;
  const auto t = ConfusionTable::build(20, cc);
  Rng rng(1);
  const auto clean = w.sample(6, rng);
  const auto r = single_edit(clean, 2, t.candidates(clean[2])[0].token, 0.1);
  try {
    brute_force_posterior(w, t, r, 0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(Posterior, ChannelWeightMonotonicity) {
  const auto w = two_fit_world();
  double previous = 0.0;
  for (double head : {0.55, 0.7, 0.85, 0.95}) {
    const double s = std::log2(head / (1.0 - head));
    const auto t = ConfusionTable::from_entries(
        4, {{{1, head}, {2, 1 - head}}, {{2, head}, {3, 1 - head}}, {{1, head}, {3, 1 - head}},
            {{0, head}, {1, 1 - head}}},
        ChannelShape::kLongTailed, s);
    const double p = posterior(w, t, single_edit({0, 1, 0}, 1, 2, 0.1), 0, 0.1).posterior;
    EXPECT_GT(p, previous);
    previous = p;
  }
}

TEST(CaseConfidence, ClosedForms) {
  const CaseTerm noisy{1.0, 1.0, 0.9, 0.05};
  EXPECT_NEAR(case_confidence(Category::kNoisy, {&noisy, 1}), 1.0 / 19.0, 1e-15);
  const CaseTerm vanishing{1.0, 1.0, 0.9, 1e-300};
  EXPECT_LT(case_confidence(Category::kNoisy, {&vanishing, 1}), 1e-290);
  // Zero prior on the replacement leaves only the alternative's term.
  const std::vector<CaseTerm> reduced{{0.0, 0.5, 0.9, 0.05}, {0.25, 0.5, 0.05, 0.05}};
  const CaseTerm alt_only{0.25, 0.5, 0.05, 0.05};
  EXPECT_DOUBLE_EQ(case_confidence(Category::kNoisy, reduced),
                   case_confidence(Category::kMultiAnswer, {&alt_only, 1}));
  EXPECT_DOUBLE_EQ(case_confidence(Category::kMultiAnswer, {&alt_only, 1}), 1.0 / 1.5);
  EXPECT_EQ(case_confidence(Category::kTrue, {}), 1.0);
  const CaseTerm bad{1.0, 1.0, 0.9, 0.0};
  EXPECT_THROW(case_confidence(Category::kNoisy, {&bad, 1}), Error);
}

TEST(CaseConfidence, AgreesWithPosteriorOnTwoElementSet) {
  const auto w = testing::explicit_world(
      {{0, 0.6, 0.3, 0.1}, {1, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}}, {1, 0, 0, 0});
  const auto t = pair_table();
  const auto report = posterior(w, t, single_edit({0, 1, 0}, 1, 2, 0.1), 0, 0.1);
  ASSERT_EQ(report.candidate_set, (std::vector<Token>{1, 2}));
  const CaseTerm term{0.3, 0.6, 0.9, 0.05};
  EXPECT_NEAR(case_confidence(Category::kNoisy, {&term, 1}), report.posterior, 1e-15);
}

TEST(Bounds, ReferenceValues) {
  EXPECT_NEAR(bounds(0.1, std::nullopt, Category::kNoisy), 1.0 / 1.9, 1e-15);
  EXPECT_LT(bounds(0.1, std::nullopt, Category::kNoisy), 0.53);
  EXPECT_NEAR(bounds(0.1, 0.5, Category::kMultiAnswer), 1.0 / 1.05, 1e-15);
  EXPECT_LT(bounds(0.1, 0.5, Category::kMultiAnswer), 0.96);
  EXPECT_LT(bounds(1e12, std::nullopt, Category::kNoisy), 1e-12);
  EXPECT_EQ(bounds(0.5, std::nullopt, Category::kTrue), 1.0);
  EXPECT_THROW(bounds(0.0, std::nullopt, Category::kNoisy), Error);
  EXPECT_THROW(bounds(0.1, std::nullopt, Category::kMultiAnswer), Error);
  EXPECT_THROW(bounds(0.1, -1.0, Category::kMultiAnswer), Error);
  EXPECT_DOUBLE_EQ(uniform_noisy_bound(0.1, 0.1, 1), bounds(0.1, std::nullopt, Category::kNoisy));
  EXPECT_NEAR(uniform_noisy_bound(0.1, 0.3, 7), 1.0 / (1.0 + 0.1 * 0.7 * 7 / 0.3), 1e-15);
}

TEST(Bounds, UniformNoisyPosteriorsRespectBound) {
  std::size_t noisy = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    auto c = testing::random_oracle_case(5000 + s);
    ConfusionConfig cc;
    cc.candidates = static_cast<int>(c.table.candidates(0).size());
    cc.seed = s;
    const auto t = ConfusionTable::build(c.world.vocab_size(), cc);
    const Token x = c.record.edits[0].original;
    Rng rng(s);
    const Token y = t.sample(x, rng);
    const auto record = single_edit(c.record.clean, c.record.edits[0].position, y, 0.1);
    const auto report = posterior(c.world, t, record, 0, 0.1);
    if (report.category != Category::kNoisy) continue;
    ++noisy;
    EXPECT_LE(report.posterior, 1.0 / (1.0 + 9.0 * report.a) + 1e-9);
    const double a = 0.1;
    if (report.a >= a) EXPECT_LE(report.posterior, 1.0 / 1.9 + 1e-9);
  }
  EXPECT_GT(noisy, 20u);
}

// Middle tokens 1..3 fit between 0s with the given weights; 4..6 never fit.
WorldModel triple_world(const std::array<double, 3>& w) {
  std::vector<std::vector<double>> rows(7, std::vector<double>(7, 0.0));
  const double total = w[0] + w[1] + w[2];
  for (int k = 0; k < 3; ++k) rows[0][1 + k] = w[k] / total;
  for (int v = 1; v < 7; ++v) rows[v][0] = 1.0;
  return testing::explicit_world(rows, {1, 0, 0, 0, 0, 0, 0});
}

ConfusionTable triple_table() {
  return ConfusionTable::from_entries(7,
                                      {{{4, 0.5}, {5, 0.5}},
                                       {{2, 0.5}, {4, 0.5}},
                                       {{4, 0.5}, {5, 0.5}},
                                       {{6, 0.5}, {5, 0.5}},
                                       {{0, 0.5}, {1, 0.5}},
                                       {{0, 0.5}, {2, 0.5}},
                                       {{0, 0.5}, {3, 0.5}}},
                                      ChannelShape::kUniform);
}

TEST(Ordering, ConstructedTriplesAreStrict) {
  Rng rng(17);
  const auto t = triple_table();
  std::vector<std::vector<PosteriorReport>> groups;
  for (int g = 0; g < 50; ++g) {
    const auto w = triple_world({1 + 8 * rng.uniform(), 1 + 8 * rng.uniform(), 1 + 8 * rng.uniform()});
    std::vector<PosteriorReport> group;
    group.push_back(posterior(w, t, single_edit({0, 3, 0}, 1, 6, 0.1), 0, 0.1));
    group.push_back(posterior(w, t, single_edit({0, 1, 0}, 1, 2, 0.1), 0, 0.1));
    group.push_back(posterior(w, t, single_edit({0, 1, 0}, 1, 4, 0.1), 0, 0.1));
    EXPECT_EQ(group[0].category, Category::kTrue);
    EXPECT_EQ(group[1].category, Category::kNoisy);
    EXPECT_EQ(group[2].category, Category::kMultiAnswer);
    EXPECT_LT(0.0, group[1].posterior);
    EXPECT_LT(group[1].posterior, group[2].posterior);
    EXPECT_LT(group[2].posterior, group[0].posterior);
    groups.push_back(std::move(group));
  }
  const auto report = verify_ordering(groups);
  EXPECT_TRUE(report.pass);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_EQ(report.compared, 150u);
}

TEST(Ordering, OnlyTrueGroupPassesVacuously) {
  const auto w = triple_world({1, 1, 1});
  const auto t = triple_table();
  const auto r = posterior(w, t, single_edit({0, 3, 0}, 1, 6, 0.1), 0, 0.1);
  const auto report = verify_ordering({{r, r}});
  EXPECT_TRUE(report.pass);
}

TEST(Ordering, DetectsInvertedPair) {
  auto noisy = posterior(triple_world({1, 1, 1}), triple_table(), single_edit({0, 1, 0}, 1, 2, 0.1), 0, 0.1);
  auto multi = posterior(triple_world({1, 1, 1}), triple_table(), single_edit({0, 1, 0}, 1, 4, 0.1), 0, 0.1);
  std::swap(noisy.posterior, multi.posterior);
  const auto report = verify_ordering({{noisy, multi}});
  EXPECT_FALSE(report.pass);
  ASSERT_EQ(report.violations.size(), 1u);
}

TEST(Ordering, LongTailedHeadIsFlaggedNotFailed) {
  // 1 -> {2: 0.9, 4: 0.1}; prior of 2 is a tenth of the prior of 1
  const double s = std::log2(9.0);
  const auto t = ConfusionTable::from_entries(7,
                                              {{{4, 0.9}, {5, 0.1}},
                                               {{2, 0.9}, {4, 0.1}},
                                               {{4, 0.9}, {5, 0.1}},
                                               {{6, 0.9}, {5, 0.1}},
                                               {{0, 0.9}, {1, 0.1}},
                                               {{0, 0.9}, {2, 0.1}},
                                               {{0, 0.9}, {3, 0.1}}},
                                              ChannelShape::kLongTailed, s);
  const auto w = triple_world({10, 1, 10});
  const auto noisy = posterior(w, t, single_edit({0, 1, 0}, 1, 2, 0.1), 0, 0.1);
  ASSERT_EQ(noisy.category, Category::kNoisy);
  // term 0.1 * 0.9 / (0.1 * 0.9) = 1 against the uniform |C| = 2 term 0.1 * 0.9 / 0.05 = 1.8
  EXPECT_NEAR(noisy.posterior, 0.5, 1e-12);
  EXPECT_GT(noisy.posterior, uniform_noisy_bound(0.1, 0.1, 2));
  const auto report = verify_ordering({{noisy}});
  EXPECT_TRUE(report.pass);
  ASSERT_EQ(report.flagged.size(), 1u);
}

TEST(Ordering, OutOfMagnitudeRecordsAreExcluded) {
  const auto w = triple_world({100, 1, 1});
  const auto r = posterior(w, triple_table(), single_edit({0, 1, 0}, 1, 2, 0.1), 0, 0.1);
  const auto report = verify_ordering({{r}});
  EXPECT_EQ(report.excluded, 1u);
  EXPECT_EQ(report.compared, 0u);
}

TEST(PosteriorJson, Fields) {
  const auto report = posterior(two_fit_world(), pair_table(), single_edit({0, 1, 0}, 1, 2, 0.1), 0, 0.1);
  const auto text = posterior_report_to_json(report);
  EXPECT_NE(text.find("\"category\":\"noisy\""), std::string::npos);
  EXPECT_NE(text.find("\"sigma\":0.0"), std::string::npos);
}

TEST(PosteriorDistribution, SumsToOneAndMatchesPosterior) {
  const auto w = two_fit_world();
  const auto t = pair_table();
  const auto dist = posterior_distribution(w, t, {0, 2, 0}, 1, 0.1);
  double sum = 0.0;
  for (double d : dist) sum += d;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(dist[1], 1.0 / 19.0, 1e-15);
  EXPECT_NEAR(dist[2], 18.0 / 19.0, 1e-15);
}

}  // namespace
}  // namespace denoise
