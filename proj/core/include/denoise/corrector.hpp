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
#include <unordered_map>
#include <vector>

#include "denoise/augment.hpp"
#include "denoise/common.hpp"

namespace denoise {

inline constexpr double kDefaultAlpha = 0.1;

/// Relative offsets of the corrupted tokens a prediction conditions on.
/// Positions outside the sentence read as a boundary symbol.
struct Window {
  std::vector<int> offsets{-1, 0, 1};

  static Window triple() { return {}; }
  // Center-free window, the count-model analogue of a masked query.
  static Window masked() { return Window{{-1, 1}}; }
  static Window parse(std::string_view text);  // "-1,0,1"

  bool has_center() const noexcept;
  std::string to_string() const;
  bool operator==(const Window&) const = default;
};

/// Smoothed count model of P(x_i | Y): for each window signature, how often
/// each clean token stood at the center. Serves as both the filtering model
/// and the final corrector.
class CorrectorModel {
 public:
  CorrectorModel(int vocab_size, Window window = {}, double alpha = kDefaultAlpha);

  /// Throws kEmptyCorpus for an empty corpus.
  static CorrectorModel train(const PairCorpus& corpus, int vocab_size, Window window = {},
                              double alpha = kDefaultAlpha);

  void observe(const CorruptionRecord& record);
  // Adds another model's counts; vocabularies and windows must match.
  void merge(const CorrectorModel& other);

  /// (count + alpha) / (total + alpha V) at the position's signature. Unseen
  /// signatures fall back to the distribution given the center token alone
  /// (or the global target marginal for center-free windows), then uniform.
  std::vector<double> predict(const Sentence& corrupted, std::size_t position) const;

  /// Per-position argmax; ties go to the input token, then to the lowest id.
  Sentence correct(const Sentence& corrupted) const;

  /// Mean per-character negative log-likelihood of the clean tokens.
  double ce_loss(const PairCorpus& corpus) const;

  int vocab_size() const noexcept { return vocab_size_; }
  const Window& window() const noexcept { return window_; }
  double alpha() const noexcept { return alpha_; }
  const std::string& corpus_hash() const noexcept { return corpus_hash_; }
  std::uint64_t observations() const noexcept { return observations_; }
  std::size_t signature_count() const noexcept { return counts_.size(); }

  CorrectorModel with_alpha(double alpha) const;
  void set_corpus_hash(std::string hash) { corpus_hash_ = std::move(hash); }

  // Equality of every count table (ignores alpha and corpus hash).
  bool same_counts(const CorrectorModel& other) const;

  std::string to_json() const;
  static CorrectorModel from_json(std::string_view text);

 private:
  std::uint64_t signature(const Sentence& tokens, std::size_t position) const;
  std::vector<double> smoothed(std::span<const std::uint64_t> counts) const;

  int vocab_size_;
  Window window_;
  double alpha_;
  // Each count vector holds V target counts followed by their total.
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> counts_;
  std::vector<std::vector<std::uint64_t>> center_counts_;
  std::vector<std::uint64_t> marginal_;
  std::uint64_t observations_ = 0;
  std::string corpus_hash_;
};

/// Argmax with the correction tie-break rule.
Token decide(std::span<const double> probs, Token input);

/// Hash identifying a training corpus (SHA-256 of its JSONL form).
std::string corpus_hash(const PairCorpus& corpus);

double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace denoise
