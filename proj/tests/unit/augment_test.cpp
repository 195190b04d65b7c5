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

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "denoise/augment.hpp"
#include "test_support.hpp"

namespace denoise {
namespace {

ConfusionTable table(int V, int c, ChannelShape shape, std::optional<double> head = std::nullopt,
                     std::uint64_t seed = 1) {
  ConfusionConfig cc;
  cc.candidates = c;
  cc.shape = shape;
  cc.head_mass = head;
  cc.seed = seed;
  return ConfusionTable::build(V, cc);
}

WorldModel world(int V, int support, std::uint64_t seed) {
  WorldConfig c;
  c.vocab_size = V;
  c.support = support;
  c.seed = seed;
  return WorldModel::build(c);
}

TEST(Confusion, UniformEntriesAreEqualAndExcludeKey) {
  const auto t = table(10, 4, ChannelShape::kUniform);
  for (Token v = 0; v < 10; ++v) {
    const auto cands = t.candidates(v);
    ASSERT_EQ(cands.size(), 4u);
    double sum = 0.0;
    for (const auto& c : cands) {
      EXPECT_NE(c.token, v);
      EXPECT_DOUBLE_EQ(c.weight, 0.25);
      sum += c.weight;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Confusion, LongTailedFollowsZipfAndSharesRanking) {
  const auto u = table(20, 5, ChannelShape::kUniform);
  const auto lt = table(20, 5, ChannelShape::kLongTailed, 0.587);
  const double s = lt.zipf_exponent();
  double h = 0.0;
  for (int k = 1; k <= 5; ++k) h += std::pow(k, -s);
  for (Token v = 0; v < 20; ++v) {
    const auto a = u.candidates(v);
    const auto b = lt.candidates(v);
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_EQ(a[k].token, b[k].token);
      EXPECT_NEAR(b[k].weight, std::pow(static_cast<double>(k + 1), -s) / h, 1e-12);
    }
  }
  EXPECT_NEAR(lt.head_mass(), 0.587, 1e-9);
}

TEST(Confusion, ZipfHeadMassInverse) {
  for (double head : {0.25, 0.4, 0.587, 0.9}) {
    const double s = zipf_exponent_for_head_mass(4, head);
    EXPECT_NEAR(zipf_head_mass(4, s), head, 1e-10);
  }
  EXPECT_NEAR(zipf_head_mass(5, 0.0), 0.2, 1e-15);
  EXPECT_THROW(zipf_exponent_for_head_mass(4, 0.2), Error);
  EXPECT_THROW(zipf_exponent_for_head_mass(4, 1.0), Error);
}

TEST(Confusion, RejectsInvalidEntries) {
  std::vector<std::vector<Candidate>> entries{{{1, 0.5}, {1, 0.5}}, {{0, 1.0}}};
  EXPECT_THROW(ConfusionTable::from_entries(2, entries, ChannelShape::kUniform), Error);
  entries = {{{0, 1.0}}, {{0, 1.0}}};  // key token as its own candidate
  EXPECT_THROW(ConfusionTable::from_entries(2, entries, ChannelShape::kUniform), Error);
  entries = {{{1, 0.7}}, {{0, 1.0}}};
  EXPECT_THROW(ConfusionTable::from_entries(2, entries, ChannelShape::kUniform), Error);
  entries = {{{1, 0.6}, {2, 0.4}}, {{0, 1.0}}, {{0, 1.0}}};
  EXPECT_THROW(ConfusionTable::from_entries(3, entries, ChannelShape::kUniform), Error);
  EXPECT_NO_THROW(ConfusionTable::from_entries(3, entries, ChannelShape::kLongTailed,
                                               std::log2(0.6 / 0.4)));
}

TEST(Confusion, JsonRoundTrip) {
  const auto lt = table(12, 3, ChannelShape::kLongTailed, 0.7, 4);
  EXPECT_EQ(ConfusionTable::from_json(lt.to_json()), lt);
}

TEST(Confusion, SamplingFollowsWeights) {
  const auto lt = table(8, 4, ChannelShape::kLongTailed, 0.6);
  Rng rng(3);
  const std::size_t n = 100000;
  std::map<Token, std::size_t> counts;
  for (std::size_t k = 0; k < n; ++k) ++counts[lt.sample(2, rng)];
  for (const auto& c : lt.candidates(2)) {
    EXPECT_NEAR(static_cast<double>(counts[c.token]) / n, c.weight, 3.0 * testing::binomial_sigma(c.weight, n));
  }
  EXPECT_EQ(counts.size(), 4u);
}

TEST(Channel, ProbabilityLaw) {
  const auto u = table(10, 4, ChannelShape::kUniform);
  const Token x = 3;
  const Token y = u.candidates(x)[0].token;
  EXPECT_DOUBLE_EQ(channel_prob(u, 0.1, x, x), 0.9);
  EXPECT_DOUBLE_EQ(channel_prob(u, 0.1, x, y), 0.1 * 0.25);
  Token outside = 0;
  while (outside == x || u.weight(x, outside) > 0.0) ++outside;
  EXPECT_EQ(channel_prob(u, 0.1, x, outside), 0.0);
}

TEST(Corrupt, IidRateWithinThreeSigma) {
  const auto w = world(20, 5, 1);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 4000;
  c.rate = 0.1;
  c.seed = 3;
  const auto corpus = generate_corpus(w, u, c);
  const std::size_t n = total_characters(corpus);
  const double observed = static_cast<double>(total_edits(corpus)) / static_cast<double>(n);
  EXPECT_NEAR(observed, 0.1, 3.0 * testing::binomial_sigma(0.1, n));
  for (const auto& r : corpus) {
    for (const auto& e : r.edits) {
      EXPECT_EQ(r.clean[e.position], e.original);
      EXPECT_EQ(r.corrupted[e.position], e.replacement);
      EXPECT_GT(u.weight(e.original, e.replacement), 0.0);
    }
    std::size_t diff = 0;
    for (std::size_t i = 0; i < r.clean.size(); ++i) diff += r.clean[i] != r.corrupted[i];
    EXPECT_EQ(diff, r.edits.size());
  }
}

TEST(Corrupt, SingleEditHasExactlyOneEdit) {
  const auto w = world(20, 5, 2);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 500;
  c.mode = CorruptionMode::kSingleEdit;
  c.annotate = true;
  const auto corpus = generate_corpus(w, u, c);
  for (const auto& r : corpus) {
    ASSERT_EQ(r.edits.size(), 1u);
    ASSERT_EQ(r.categories.size(), 1u);
    EXPECT_EQ(r.categories[0], categorize(r, w, u, 0).label);
  }
}

TEST(Corrupt, CorruptFractionLeavesCleanSentences) {
  const auto w = world(20, 5, 2);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 4000;
  c.mode = CorruptionMode::kSingleEdit;
  c.corrupt_fraction = 0.5;
  const auto corpus = generate_corpus(w, u, c);
  const auto erroneous = std::count_if(corpus.begin(), corpus.end(), [](const auto& r) { return !r.edits.empty(); });
  EXPECT_NEAR(static_cast<double>(erroneous) / 4000.0, 0.5, 3.0 * testing::binomial_sigma(0.5, 4000));
  for (const auto& r : corpus) {
    if (r.edits.empty()) {
      EXPECT_EQ(r.clean, r.corrupted);
    }
  }
}

TEST(Corrupt, GenerationIsDeterministic) {
  const auto w = world(20, 5, 2);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 300;
  c.seed = 99;
  EXPECT_EQ(generate_corpus(w, u, c), generate_corpus(w, u, c));
  c.n_sentences = 0;
  EXPECT_THROW(generate_corpus(w, u, c), Error);
}

TEST(Corrupt, CharacterBudgetsArePrefixes) {
  const auto w = world(20, 5, 2);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.seed = 5;
  c.stream = "d_r";
  const auto small = generate_corpus_characters(w, u, c, 1000);
  const auto large = generate_corpus_characters(w, u, c, 10000);
  EXPECT_GE(total_characters(small), 1000u);
  EXPECT_GE(total_characters(large), 10000u);
  ASSERT_LE(small.size(), large.size());
  for (std::size_t k = 0; k < small.size(); ++k) EXPECT_EQ(small[k], large[k]);
  c.n_sentences = large.size();
  EXPECT_EQ(generate_corpus(w, u, c), large);
}

// Hand world over {0,1,2,3}: 0 -> {1,2}, 1 -> {3}, 2 -> {3}, 3 -> {0}.
WorldModel hand_world() {
  return testing::explicit_world(
      {{0, 0.5, 0.5, 0}, {0, 0, 0, 1}, {0, 0, 0, 1}, {1, 0, 0, 0}}, {1, 0, 0, 0});
}

TEST(Categorize, HandCases) {
  const auto w = hand_world();
  // 1 -> {2, 3}, 2 -> {1, 0}, 3 -> {1, 2}, 0 -> {3, 1}
  const auto t = ConfusionTable::from_entries(
      4, {{{3, 0.5}, {1, 0.5}}, {{2, 0.5}, {3, 0.5}}, {{1, 0.5}, {0, 0.5}}, {{1, 0.5}, {2, 0.5}}},
      ChannelShape::kUniform);
  const Sentence clean{0, 1, 3, 0};
  // 1 -> 2 at position 1: 2 is valid in (0, ., 3), so the observation is noisy
  auto noisy = categorize_in_context(w, t, clean, 1, 2, 0.1);
  EXPECT_EQ(noisy.label, Category::kNoisy);
  EXPECT_EQ(noisy.candidate_set, (std::vector<Token>{1, 2}));
  // 3 -> 1 at position 2: only 3 fits between 1 and 0, and 3 can become 1
  auto truth = categorize_in_context(w, t, clean, 2, 1, 0.1);
  EXPECT_EQ(truth.label, Category::kTrue);
  EXPECT_EQ(truth.candidate_set, (std::vector<Token>{3}));
}

TEST(Categorize, MultiAnswerCase) {
  const auto w = hand_world();
  // 1 -> {0}, 2 -> {0}: observing 0 between 0 and 3 has two restorations
  const auto t = ConfusionTable::from_entries(
      4, {{{1, 1.0}}, {{0, 1.0}}, {{0, 1.0}}, {{0, 1.0}}}, ChannelShape::kUniform);
  const auto multi = categorize_in_context(w, t, {0, 1, 3, 0}, 1, 0, 0.1);
  EXPECT_EQ(multi.label, Category::kMultiAnswer);
  EXPECT_EQ(multi.candidate_set, (std::vector<Token>{1, 2}));
}

TEST(Categorize, MultiEditRecordsAreRejected) {
  const auto w = hand_world();
  const auto t = ConfusionTable::from_entries(
      4, {{{1, 1.0}}, {{0, 1.0}}, {{0, 1.0}}, {{0, 1.0}}}, ChannelShape::kUniform);
  CorruptionRecord r;
  r.clean = {0, 1, 3, 0};
  r.corrupted = {0, 0, 0, 0};
  r.edits = {{1, 1, 0}, {2, 3, 0}};
  try {
    categorize(r, w, t, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedRecord);
  }
}

TEST(Confusion, SmallUniformAndTopMass) {
  const auto t = table(4, 2, ChannelShape::kUniform);
  for (Token v = 0; v < 4; ++v) {
    ASSERT_EQ(t.candidates(v).size(), 2u);
    for (const auto& c : t.candidates(v)) EXPECT_DOUBLE_EQ(c.weight, 0.5);
  }
  EXPECT_NEAR(table(20, 7, ChannelShape::kUniform).head_mass(), 1.0 / 7.0, 1e-12);
  EXPECT_THROW(table(4, 4, ChannelShape::kUniform), Error);
}

TEST(Corrupt, RateZeroIsIdentity) {
  const auto t = table(6, 2, ChannelShape::kUniform);
  Rng rng(1);
  const Sentence s{0, 1, 2, 3, 4, 5};
  const auto r = corrupt(s, t, 0.0, CorruptionMode::kIid, rng);
  EXPECT_EQ(r.corrupted, s);
  EXPECT_TRUE(r.edits.empty());
}

TEST(Corrupt, RateOneForcesUniqueCandidate) {
  // v -> v + 1 mod 4
  const auto t = ConfusionTable::from_entries(4, {{{1, 1.0}}, {{2, 1.0}}, {{3, 1.0}}, {{0, 1.0}}},
                                              ChannelShape::kUniform);
  Rng rng(1);
  const auto r = corrupt({0, 1, 2, 3, 3}, t, 1.0, CorruptionMode::kIid, rng);
  EXPECT_EQ(r.corrupted, (Sentence{1, 2, 3, 0, 0}));
  EXPECT_EQ(r.edits.size(), 5u);
  EXPECT_THROW(corrupt({0}, t, 1.5, CorruptionMode::kIid, rng), Error);
}

TEST(Corrupt, AnnotationsMatchRecategorization) {
  const auto w = world(20, 5, 1);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 1000;
  c.mode = CorruptionMode::kSingleEdit;
  c.annotate = true;
  const auto corpus = generate_corpus(w, u, c);
  std::array<std::size_t, 3> planted{}, recount{};
  for (const auto& r : corpus) {
    ++planted[static_cast<std::size_t>(r.categories[0])];
    ++recount[static_cast<std::size_t>(categorize(r, w, u, 0).label)];
  }
  EXPECT_EQ(planted, recount);
  EXPECT_GT(planted[static_cast<std::size_t>(Category::kNoisy)], 0u);
  EXPECT_GT(planted[static_cast<std::size_t>(Category::kMultiAnswer)], 0u);
}

TEST(Corrupt, EmptyCorpusRequestIsRejected) {
  const auto w = world(20, 5, 1);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 0;
  try {
    generate_corpus(w, u, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(Corrupt, LengthIsPreserved) {
  const auto w = world(20, 5, 1);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 500;
  c.rate = 0.3;
  for (const auto& r : generate_corpus(w, u, c)) {
    EXPECT_EQ(r.clean.size(), r.corrupted.size());
    EXPECT_GE(r.clean.size(), 8u);
    EXPECT_LE(r.clean.size(), 16u);
  }
}

TEST(Jsonl, RoundTripAndValidation) {
  const auto w = world(20, 5, 2);
  const auto u = table(20, 5, ChannelShape::kUniform);
  CorpusConfig c;
  c.n_sentences = 50;
  c.mode = CorruptionMode::kSingleEdit;
  c.annotate = true;
  c.corrupt_fraction = 0.7;
  const auto corpus = generate_corpus(w, u, c);
  const auto text = corpus_to_jsonl(corpus);
  const auto back = corpus_from_jsonl(text);
  ASSERT_EQ(back.size(), corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    EXPECT_EQ(back[k].clean, corpus[k].clean);
    EXPECT_EQ(back[k].corrupted, corpus[k].corrupted);
    EXPECT_EQ(back[k].edits, corpus[k].edits);
    EXPECT_EQ(back[k].categories, corpus[k].categories);
  }
  EXPECT_EQ(corpus_to_jsonl(back), text);
  EXPECT_THROW(corpus_from_jsonl("{\"clean\":[1,2],\"corrupted\":[1,3],\"edits\":[]}\n"), Error);
  EXPECT_THROW(corpus_from_jsonl("not json\n"), Error);
}

}  // namespace
}  // namespace denoise
