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
#include "denoise/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace denoise {
namespace {

// The reference bounds assume at most 10% of characters are replaced.
constexpr double kReferenceRate = 0.1;

void check_single_edit(const CorruptionRecord& record, std::size_t edit_index) {
  if (record.edits.size() != 1 || edit_index != 0) {
    throw Error(ErrorCode::kUnsupportedRecord, "posterior is defined for single-edit records only");
  }
  const Edit& e = record.edits.front();
  if (record.clean.size() != record.corrupted.size() || e.position >= record.clean.size()) {
    throw Error(ErrorCode::kUnsupportedRecord, "record shape is inconsistent");
  }
  for (std::size_t j = 0; j < record.clean.size(); ++j) {
    const bool equal = record.clean[j] == record.corrupted[j];
    if (equal == (j == e.position)) throw Error(ErrorCode::kUnsupportedRecord, "record differs from its edit list");
  }
}

}  // namespace

std::vector<double> posterior_distribution(const WorldModel& world, const ConfusionTable& table,
                                           const Sentence& corrupted, std::size_t position,
                                           double rate) {
  const Token observed = corrupted.at(position);
  auto weights = world.conditional(corrupted, position);
  double total = 0.0;
  for (std::size_t v = 0; v < weights.size(); ++v) {
    weights[v] *= channel_prob(table, rate, static_cast<Token>(v), observed);
    total += weights[v];
  }
  if (total == 0.0) throw Error(ErrorCode::kZeroDenominator, "no token can produce the observation");
  for (double& w : weights) w /= total;
  return weights;
}

PosteriorReport posterior_in_context(const WorldModel& world, const ConfusionTable& table,
                                     const Sentence& clean, std::size_t position, Token replacement,
                                     double rate) {
  const Token x = clean.at(position);
  const Token y = replacement;
  if (x == y) throw Error(ErrorCode::kInvalidArgument, "replacement equals the original");
  const auto prior = world.conditional(clean, position);

  std::vector<double> joint(prior.size());
  double denominator = 0.0;
  for (std::size_t v = 0; v < prior.size(); ++v) {
    joint[v] = channel_prob(table, rate, static_cast<Token>(v), y) * prior[v];
    denominator += joint[v];
  }
  if (denominator == 0.0) throw Error(ErrorCode::kZeroDenominator, "no token can produce the replacement");
  if (joint[x] == 0.0) throw Error(ErrorCode::kUnsupportedRecord, "edit is unreachable under the world and channel");

  PosteriorReport report;
  report.position = position;
  report.original = x;
  report.replacement = y;
  report.posterior = joint[x] / denominator;
  report.keep_prob = 1.0 - rate;
  report.replace_prob = channel_prob(table, rate, x, y);
  report.uniform_replace_prob = rate / static_cast<double>(table.candidates(x).size());
  report.uniform_channel = table.shape() == ChannelShape::kUniform;

  bool replacement_plausible = false;
  double min_channel_ratio = std::numeric_limits<double>::infinity();
  report.a = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < prior.size(); ++v) {
    if (joint[v] == 0.0) continue;
    const auto token = static_cast<Token>(v);
    report.candidate_set.push_back(token);
    if (token == x) continue;
    const double prior_ratio = prior[v] / prior[x];
    const double channel_ratio = channel_prob(table, rate, token, y) / report.replace_prob;
    report.prior_ratios.push_back(prior_ratio);
    report.a = std::min(report.a, prior_ratio);
    if (token == y) {
      replacement_plausible = true;
      report.noisy_term = prior_ratio * channel_ratio;
    } else {
      report.sigma += prior_ratio * channel_ratio;
      min_channel_ratio = std::min(min_channel_ratio, channel_ratio);
    }
  }

  if (report.candidate_set.size() == 1) {
    report.category = Category::kTrue;
    report.a = 0.0;
    report.bound = 1.0;
  } else if (replacement_plausible) {
    report.category = Category::kNoisy;
    if (std::isfinite(min_channel_ratio)) report.b = min_channel_ratio;
    if (rate <= kReferenceRate + 1e-12) report.bound = bounds(report.a, std::nullopt, Category::kNoisy);
  } else {
    report.category = Category::kMultiAnswer;
    report.b = min_channel_ratio;
    report.bound = bounds(report.a, report.b, Category::kMultiAnswer);
  }
  return report;
}

PosteriorReport posterior(const WorldModel& world, const ConfusionTable& table,
                          const CorruptionRecord& record, std::size_t edit_index, double rate) {
  check_single_edit(record, edit_index);
  const Edit& e = record.edits.front();
  return posterior_in_context(world, table, record.clean, e.position, e.replacement, rate);
}

double brute_force_posterior(const WorldModel& world, const ConfusionTable& table,
                             const CorruptionRecord& record, std::size_t edit_index, double rate,
                             std::size_t budget) {
  check_single_edit(record, edit_index);
  const Sentence& observed = record.corrupted;
  const std::size_t length = observed.size();
  const auto V = static_cast<std::size_t>(world.vocab_size());
  std::size_t space = 1;
  for (std::size_t j = 0; j < length; ++j) {
    if (space > budget / V) throw Error(ErrorCode::kBudgetExceeded, "V^L exceeds the enumeration budget");
    space *= V;
  }
  const std::size_t edit_position = record.edits.front().position;

  Sentence candidate(length, Token{0});
  double evidence = 0.0;
  double target = 0.0;
  for (std::size_t n = 0; n < space; ++n) {
    // P(Y | X') with the channel acting at the edit position only
    double likelihood = 1.0;
    for (std::size_t j = 0; j < length && likelihood != 0.0; ++j) {
      likelihood *= j == edit_position ? channel_prob(table, rate, candidate[j], observed[j])
                                       : (candidate[j] == observed[j] ? 1.0 : 0.0);
    }
    if (likelihood != 0.0) {
      const double mass = world.sentence_prob(candidate) * likelihood;
      evidence += mass;
      if (candidate == record.clean) target += mass;
    }
    for (std::size_t j = 0; j < length; ++j) {
      if (++candidate[j] < V) break;
      candidate[j] = 0;
    }
  }
  if (evidence == 0.0) throw Error(ErrorCode::kZeroDenominator, "observation has zero evidence");
  return target / evidence;
}

double case_confidence(Category category, std::span<const CaseTerm> terms) {
  if (category == Category::kTrue) {
    for (const auto& t : terms) {
      if (t.prior_alt * t.channel_alt != 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "a true sample has no competing candidates");
      }
    }
    return 1.0;
  }
  if (terms.empty()) throw Error(ErrorCode::kInvalidArgument, "noisy and multi-answer forms need a ratio term");
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.channel_orig == 0.0 || t.prior_orig == 0.0) {
      throw Error(ErrorCode::kZeroDenominator, "the original cannot produce the replacement");
    }
    total += (t.prior_alt / t.prior_orig) * (t.channel_alt / t.channel_orig);
  }
  return 1.0 / (1.0 + total);
}

double bounds(double a, std::optional<double> b, Category category) {
  if (!(a > 0.0)) throw Error(ErrorCode::kInvalidArgument, "a must be positive");
  const double keep_over_replace = (1.0 - kReferenceRate) / kReferenceRate;
  switch (category) {
    case Category::kTrue:
      return 1.0;
    case Category::kNoisy:
      return 1.0 / (1.0 + keep_over_replace * a);
    case Category::kMultiAnswer:
      if (!b || !(*b > 0.0)) throw Error(ErrorCode::kInvalidArgument, "b must be positive");
      return 1.0 / (1.0 + a * *b);
  }
  return 1.0;
}

double uniform_noisy_bound(double a, double rate, std::size_t confusion_size) {
  if (!(a > 0.0)) throw Error(ErrorCode::kInvalidArgument, "a must be positive");
  if (!(rate > 0.0 && rate < 1.0) || confusion_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "rate must lie in (0, 1) and |C| >= 1");
  }
  return 1.0 / (1.0 + a * (1.0 - rate) * static_cast<double>(confusion_size) / rate);
}

OrderingReport verify_ordering(const std::vector<std::vector<PosteriorReport>>& groups,
                               const OrderingConfig& config) {
  OrderingReport out;
  const double lo = 1.0 / config.magnitude_ratio;
  const double hi = config.magnitude_ratio;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g];
    std::vector<std::size_t> noisy;
    std::vector<std::size_t> multi;
    for (std::size_t k = 0; k < group.size(); ++k) {
      const auto& r = group[k];
      const bool comparable = std::all_of(r.prior_ratios.begin(), r.prior_ratios.end(),
                                          [&](double q) { return q >= lo && q <= hi; });
      if (!comparable) {
        ++out.excluded;
        continue;
      }
      ++out.compared;
      if (!(r.posterior > 0.0)) out.violations.push_back({g, k, k, "posterior is not positive"});
      switch (r.category) {
        case Category::kTrue:
          if (r.posterior != 1.0) out.violations.push_back({g, k, k, "true sample posterior differs from 1"});
          break;
        case Category::kNoisy: {
          if (!(r.posterior < 1.0)) out.violations.push_back({g, k, k, "noisy posterior reaches 1"});
          const double reference = 1.0 / (1.0 + config.a * r.keep_prob / r.uniform_replace_prob);
          if (!r.uniform_channel && r.posterior > reference) {
            out.flagged.emplace_back(g, k);
          } else {
            noisy.push_back(k);
          }
          break;
        }
        case Category::kMultiAnswer:
          if (!(r.posterior < 1.0)) out.violations.push_back({g, k, k, "multi-answer posterior reaches 1"});
          multi.push_back(k);
          break;
      }
    }
    for (std::size_t n : noisy) {
      for (std::size_t m : multi) {
        if (!(group[n].posterior < group[m].posterior)) {
          out.violations.push_back({g, n, m, "noisy posterior not below multi-answer posterior"});
        }
      }
    }
  }
  out.pass = out.violations.empty();
  return out;
}

std::string posterior_report_to_json(const PosteriorReport& report) {
  nlohmann::ordered_json doc;
  doc["posterior"] = report.posterior;
  doc["category"] = to_string(report.category);
  doc["sigma"] = report.sigma;
  doc["bound"] = report.bound ? nlohmann::ordered_json(*report.bound) : nlohmann::ordered_json(nullptr);
  return doc.dump();
}

}  // namespace denoise
