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
#include "denoise/calibration.hpp"

#include <cmath>

#include "denoise/harness.hpp"

namespace denoise {

std::vector<PredictionOutcome> collect_outcomes(const CorrectorModel& model, const PairCorpus& corpus) {
  std::vector<PredictionOutcome> outcomes;
  outcomes.reserve(total_characters(corpus));
  for (const auto& record : corpus) {
    for (std::size_t i = 0; i < record.corrupted.size(); ++i) {
      const auto probs = model.predict(record.corrupted, i);
      const Token input = record.corrupted[i];
      const Token predicted = decide(probs, input);
      outcomes.push_back({probs[predicted], predicted == record.clean[i], probs[input]});
    }
  }
  return outcomes;
}

FilteredOutcomes filter_easy_positives(const std::vector<PredictionOutcome>& outcomes, double cutoff) {
  FilteredOutcomes out;
  for (const auto& o : outcomes) {
    if (1.0 - o.kept_mass_on_input >= cutoff) {
      out.outcomes.push_back(o);
    } else {
      ++out.n_excluded;
    }
  }
  return out;
}

std::size_t bin_index(double confidence, std::size_t n_bins) {
  if (n_bins == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one bin");
  if (!(confidence >= 0.0 && confidence <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "confidence outside [0, 1]");
  const auto n = static_cast<double>(n_bins);
  auto index = static_cast<std::size_t>(std::floor(confidence * n));
  if (index >= n_bins) index = n_bins - 1;
  // settle against the exact boundaries k/n rather than the rounded product
  while (index + 1 < n_bins && confidence >= static_cast<double>(index + 1) / n) ++index;
  while (index > 0 && confidence < static_cast<double>(index) / n) --index;
  return index;
}

double ece_from_bins(const std::vector<CalibrationBin>& bins) {
  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  if (total == 0) return 0.0;
  double ece = 0.0;
  for (const auto& b : bins) {
    if (b.count == 0) continue;
    ece += static_cast<double>(b.count) / static_cast<double>(total) * std::abs(b.accuracy - b.mean_confidence);
  }
  return ece;
}

CalibrationReport ece(const std::vector<PredictionOutcome>& outcomes, std::size_t n_bins) {
  if (outcomes.empty()) throw Error(ErrorCode::kInvalidArgument, "ece of an empty outcome list");
  std::vector<double> confidence_sum(n_bins, 0.0);
  std::vector<std::size_t> correct(n_bins, 0);
  std::vector<std::size_t> count(n_bins, 0);
  for (const auto& o : outcomes) {
    const std::size_t b = bin_index(o.confidence, n_bins);
    confidence_sum[b] += o.confidence;
    correct[b] += o.correct ? 1 : 0;
    ++count[b];
  }
  CalibrationReport report;
  report.n_total = outcomes.size();
  const auto n = static_cast<double>(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    CalibrationBin bin{static_cast<double>(b) / n, static_cast<double>(b + 1) / n, 0.0, 0.0, count[b]};
    if (count[b] > 0) {
      bin.mean_confidence = confidence_sum[b] / static_cast<double>(count[b]);
      bin.accuracy = static_cast<double>(correct[b]) / static_cast<double>(count[b]);
    }
    report.bins.push_back(bin);
  }
  report.ece = ece_from_bins(report.bins);
  return report;
}

CalibrationReport calibrate(const CorrectorModel& model, const PairCorpus& corpus, double cutoff,
                            std::size_t n_bins) {
  const auto filtered = filter_easy_positives(collect_outcomes(model, corpus), cutoff);
  CalibrationReport report;
  if (filtered.outcomes.empty()) {
    const auto n = static_cast<double>(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
      report.bins.push_back({static_cast<double>(b) / n, static_cast<double>(b + 1) / n, 0.0, 0.0, 0});
    }
  } else {
    report = ece(filtered.outcomes, n_bins);
  }
  report.n_excluded = filtered.n_excluded;
  return report;
}

std::string reliability_csv(const CalibrationReport& report) {
  std::string out = "bin_lower,bin_upper,mean_confidence,accuracy,count\n";
  for (const auto& b : report.bins) {
    out += format_double(b.lower, 3) + ',' + format_double(b.upper, 3) + ',' +
           format_double(b.mean_confidence, 6) + ',' + format_double(b.accuracy, 6) + ',' +
           std::to_string(b.count) + '\n';
  }
  return out;
}

}  // namespace denoise
