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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "denoise/augment.hpp"
#include "denoise/world.hpp"

namespace denoise {

// Lower bound a on prior ratios used for the reference bounds.
inline constexpr double kDefaultPriorRatioBound = 0.1;
inline constexpr std::size_t kEnumerationBudget = 1000000;

/// Exact Bayesian confidence of restoring one replacement.
struct PosteriorReport {
  std::size_t position = 0;
  Token original = 0;
  Token replacement = 0;
  double posterior = 0.0;
  std::vector<Token> candidate_set;  // V-hat, sorted ascending
  Category category = Category::kTrue;
  // Ratio term contributed by the replacement itself (zero unless noisy) and
  // the sum of ratio terms over the remaining candidates.
  double noisy_term = 0.0;
  double sigma = 0.0;
  std::optional<double> bound;
  double a = 0.0;  // smallest prior ratio P(v|ctx)/P(x|ctx), v in V-hat \ {x}
  std::optional<double> b;  // smallest channel ratio over V-hat \ {x, y}
  // P(v|ctx)/P(x|ctx) for v in V-hat \ {x}, in candidate_set order.
  std::vector<double> prior_ratios;
  double keep_prob = 0.0;     // P(y | ctx, y)
  double replace_prob = 0.0;  // P(y | ctx, x)
  // Replacement probability a uniform channel with the same |C_x| would give.
  double uniform_replace_prob = 0.0;
  bool uniform_channel = true;
};

/// P(x_i = v | Y) for every v under the single-position channel at
/// `position`, with the other positions of `corrupted` as context.
std::vector<double> posterior_distribution(const WorldModel& world, const ConfusionTable& table,
                                           const Sentence& corrupted, std::size_t position,
                                           double rate);

/// Closed-form confidence of a single-edit record. Throws kUnsupportedRecord
/// for multi-edit or unreachable records and kZeroDenominator when no token
/// can produce the observed replacement.
PosteriorReport posterior(const WorldModel& world, const ConfusionTable& table,
                          const CorruptionRecord& record, std::size_t edit_index, double rate);

/// Same quantity for an edit of a (possibly multi-edit) record, taking the
/// clean sentence as context.
PosteriorReport posterior_in_context(const WorldModel& world, const ConfusionTable& table,
                                     const Sentence& clean, std::size_t position,
                                     Token replacement, double rate);

/// Direct Bayes by enumerating every clean sentence of the record's length:
/// weight P(X') * P(Y | X') with the channel acting only at the edit position,
/// normalize, and return the mass of the record's clean sentence.
double brute_force_posterior(const WorldModel& world, const ConfusionTable& table,
                             const CorruptionRecord& record, std::size_t edit_index, double rate,
                             std::size_t budget = kEnumerationBudget);

/// One ratio term of the closed forms: (prior_alt / prior_orig) *
/// (channel_alt / channel_orig).
struct CaseTerm {
  double prior_alt;
  double prior_orig;
  double channel_alt;
  double channel_orig;
};

/// 1 / (1 + sum of ratio terms). True samples must carry no terms. For the
/// noisy form the first term belongs to the replacement itself.
double case_confidence(Category category, std::span<const CaseTerm> terms);

/// Reference upper bounds at the 0.9 / 0.1 keep/replace channel:
/// noisy 1/(1+9a), multi-answer 1/(1+ab), true 1.
double bounds(double a, std::optional<double> b, Category category);

/// Noisy bound for a uniform channel at `rate` over `confusion_size`
/// candidates: 1/(1 + a (1-rate) |C| / rate). Equals bounds() for |C| = 1,
/// rate = 0.1.
double uniform_noisy_bound(double a, double rate, std::size_t confusion_size);

struct OrderingConfig {
  double magnitude_ratio = 10.0;  // priors compared only within this factor
  double a = kDefaultPriorRatioBound;
};

struct OrderingViolation {
  std::size_t group;
  std::size_t lhs;
  std::size_t rhs;  // equals lhs for single-record violations
  std::string reason;
};

struct OrderingReport {
  bool pass = true;
  std::vector<OrderingViolation> violations;
  // (group, index) of noisy records from non-uniform channels whose posterior
  // exceeds the uniform-channel bound. Flagged records are not compared.
  std::vector<std::pair<std::size_t, std::size_t>> flagged;
  std::size_t compared = 0;
  std::size_t excluded = 0;
};

/// Checks 0 < noisy < multi-answer < true = 1 within each group of reports
/// sharing a context.
OrderingReport verify_ordering(const std::vector<std::vector<PosteriorReport>>& groups,
                               const OrderingConfig& config = {});

// {"posterior":..,"category":..,"sigma":..,"bound":..} (bound null if absent).
std::string posterior_report_to_json(const PosteriorReport& report);

}  // namespace denoise
