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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "denoise/common.hpp"
#include "denoise/rng.hpp"

namespace denoise {

// Largest number of order-k contexts (V^k) a world may hold.
inline constexpr std::size_t kContextBudget = 10000;
inline constexpr double kProbabilityTolerance = 1e-12;

struct WorldConfig {
  int vocab_size = 20;
  int order = 1;
  std::uint64_t seed = 0;
  // Generator recipe, used when `rows` is empty: every row gets exactly
  // `support` nonzero entries with raw weights drawn from [1, weight_spread].
  int support = 5;
  double weight_spread = 2.0;
  // Explicit parameters. `initial` empty means uniform; `rows` holds V^order
  // rows indexed by context (see WorldModel::context_index).
  std::vector<double> initial;
  std::vector<std::vector<double>> rows;
};

/// Ground-truth generative language: an order-k Markov chain over a small
/// vocabulary. Entries stored as zero are exactly zero, which is what makes
/// candidate sets and sample categories crisp.
///
/// Contexts shorter than k (the first k-1 positions) are left-padded with
/// token 0. Immutable after construction.
class WorldModel {
 public:
  static WorldModel build(const WorldConfig& config);
  static WorldModel from_json(std::string_view text);
  std::string to_json() const;

  int vocab_size() const noexcept { return vocab_size_; }
  int order() const noexcept { return order_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t context_count() const noexcept { return context_count_; }

  std::span<const double> initial() const noexcept { return initial_; }
  std::span<const double> row(std::size_t context) const;
  std::size_t context_index(std::span<const Token> context) const;

  // Probability of token sentence[position] given its left context (the
  // initial distribution at position 0).
  double factor(const Sentence& sentence, std::size_t position) const;

  double sentence_prob(const Sentence& sentence) const;

  // Exact P(v | every other position) over the vocabulary. Throws
  // kImpossibleContext when the surrounding context has probability zero.
  std::vector<double> conditional(const Sentence& sentence, std::size_t position) const;

  Sentence sample(std::size_t length, Rng& rng) const;

  bool valid(const Sentence& sentence) const noexcept;

  bool operator==(const WorldModel&) const = default;

 private:
  WorldModel() = default;
  void validate() const;
  std::size_t context_at(const Sentence& sentence, std::size_t position) const;

  int vocab_size_ = 0;
  int order_ = 1;
  std::uint64_t seed_ = 0;
  std::size_t context_count_ = 0;
  std::vector<double> initial_;
  std::vector<double> transitions_;  // context_count_ x vocab_size_, row-major
};

}  // namespace denoise
