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
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "denoise/common.hpp"
#include "denoise/rng.hpp"
#include "denoise/world.hpp"

namespace denoise {

enum class ChannelShape { kUniform, kLongTailed };

const char* to_string(ChannelShape shape) noexcept;
ChannelShape parse_channel_shape(std::string_view text);

struct Candidate {
  Token token;
  double weight;
  bool operator==(const Candidate&) const = default;
};

struct ConfusionConfig {
  int candidates = 5;  // |C_v|, identical for every token
  ChannelShape shape = ChannelShape::kUniform;
  double zipf_exponent = 1.0;
  // When set and the shape is long-tailed, the exponent is calibrated so the
  // top candidate of every entry carries this share of replacement mass.
  std::optional<double> head_mass;
  std::uint64_t seed = 0;
};

/// Zipf weights k^-s / H(c, s) for ranks 1..c.
std::vector<double> zipf_weights(int count, double exponent);
double zipf_head_mass(int count, double exponent);
// Inverse of zipf_head_mass by bisection; head must lie in [1/count, 1).
double zipf_exponent_for_head_mass(int count, double head_mass);

/// Per-token replacement candidates with sampling weights. Candidates are
/// stored ranked (descending weight); the candidate sets and their ranking
/// are independent of the shape, so a uniform and a long-tailed table built
/// from the same seed share confusion sets.
class ConfusionTable {
 public:
  static ConfusionTable build(int vocab_size, const ConfusionConfig& config);
  static ConfusionTable from_entries(int vocab_size, std::vector<std::vector<Candidate>> entries,
                                     ChannelShape shape, double zipf_exponent = 0.0);
  static ConfusionTable from_json(std::string_view text);
  std::string to_json() const;

  // Same ranked candidate sets, weights recomputed for a new shape.
  ConfusionTable reweighted(ChannelShape shape, double zipf_exponent) const;

  int vocab_size() const noexcept { return vocab_size_; }
  ChannelShape shape() const noexcept { return shape_; }
  double zipf_exponent() const noexcept { return exponent_; }

  std::span<const Candidate> candidates(Token source) const;
  double weight(Token source, Token target) const;
  Token sample(Token source, Rng& rng) const;
  // Mean over entries of the top candidate's weight.
  double head_mass() const;

  bool operator==(const ConfusionTable&) const = default;

 private:
  ConfusionTable() = default;
  void validate() const;

  int vocab_size_ = 0;
  ChannelShape shape_ = ChannelShape::kUniform;
  double exponent_ = 0.0;
  std::vector<std::vector<Candidate>> entries_;
};

/// Single-position channel law: P(observed | source) is 1 - rate when the
/// token is kept and rate * weight(source -> observed) otherwise.
double channel_prob(const ConfusionTable& table, double rate, Token source, Token observed);

struct Edit {
  std::size_t position;
  Token original;
  Token replacement;
  bool operator==(const Edit&) const = default;
};

enum class Category { kTrue = 0, kNoisy = 1, kMultiAnswer = 2 };

const char* to_string(Category category) noexcept;

struct SampleCategory {
  Category label;
  std::vector<Token> candidate_set;  // sorted ascending
};

struct CorruptionRecord {
  Sentence clean;
  Sentence corrupted;
  std::vector<Edit> edits;  // ascending positions
  double channel_rate = 0.0;
  // One label per edit when annotated, empty otherwise.
  std::vector<Category> categories;

  bool operator==(const CorruptionRecord&) const = default;
};

using PairCorpus = std::vector<CorruptionRecord>;

enum class CorruptionMode {
  kIid,         // every position replaced independently with probability rate
  kSingleEdit,  // exactly one uniformly chosen position replaced
};

// rate = 1 replaces every position; corpora and channel laws need rate < 1.
CorruptionRecord corrupt(const Sentence& sentence, const ConfusionTable& table, double rate,
                         CorruptionMode mode, Rng& rng);

/// Category of replacing clean[position] by `replacement`, with the rest of
/// the clean sentence as context. This is the exact single-edit taxonomy.
SampleCategory categorize_in_context(const WorldModel& world, const ConfusionTable& table,
                                     const Sentence& clean, std::size_t position,
                                     Token replacement, double rate);

/// Category of a single-edit record. Records with more than one edit are
/// rejected with kUnsupportedRecord.
SampleCategory categorize(const CorruptionRecord& record, const WorldModel& world,
                          const ConfusionTable& table, std::size_t edit_index);

struct LengthRange {
  std::size_t min = 8;
  std::size_t max = 16;
};

struct CorpusConfig {
  std::size_t n_sentences = 1000;
  LengthRange length;
  double rate = 0.1;
  CorruptionMode mode = CorruptionMode::kIid;
  bool annotate = false;
  std::uint64_t seed = 0;
  std::string stream = "corpus";
  // Fraction of sentences passed through the channel; the rest stay clean.
  double corrupt_fraction = 1.0;
};

PairCorpus generate_corpus(const WorldModel& world, const ConfusionTable& table,
                           const CorpusConfig& config);

// Generates sentences from the config's stream until at least
// `target_characters` tokens exist. Smaller targets yield prefixes of larger.
PairCorpus generate_corpus_characters(const WorldModel& world, const ConfusionTable& table,
                                      const CorpusConfig& config, std::size_t target_characters);

std::size_t total_characters(const PairCorpus& corpus) noexcept;
std::size_t total_edits(const PairCorpus& corpus) noexcept;

// JSONL: {"clean":[..],"corrupted":[..],"edits":[[i,x,y],..],"categories":[..]}
// with categories as integers (0 true, 1 noisy, 2 multi-answer).
std::string record_to_json(const CorruptionRecord& record);
std::string corpus_to_jsonl(const PairCorpus& corpus);
PairCorpus corpus_from_jsonl(std::string_view text);

}  // namespace denoise
