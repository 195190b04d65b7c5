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
#include <string>
#include <vector>

#include "denoise/augment.hpp"
#include "denoise/corrector.hpp"

namespace denoise {

inline constexpr double kEasyPositiveCutoff = 0.1;
inline constexpr std::size_t kDefaultBins = 10;

struct PredictionOutcome {
  double confidence;          // probability of the predicted token
  bool correct;               // predicted token equals the clean token
  double kept_mass_on_input;  // probability assigned to the observed token
};

struct CalibrationBin {
  double lower;
  double upper;
  double mean_confidence;  // 0 for empty bins
  double accuracy;         // 0 for empty bins
  std::size_t count;
};

struct CalibrationReport {
  std::vector<CalibrationBin> bins;
  double ece = 0.0;
  std::size_t n_total = 0;  // outcomes binned
  std::size_t n_excluded = 0;
};

struct FilteredOutcomes {
  std::vector<PredictionOutcome> outcomes;
  std::size_t n_excluded = 0;
};

/// One outcome per character position of the corpus.
std::vector<PredictionOutcome> collect_outcomes(const CorrectorModel& model,
                                                const PairCorpus& corpus);

/// Drops easy positives: keeps outcomes whose mass off the input token,
/// 1 - kept_mass_on_input, is at least `cutoff`.
FilteredOutcomes filter_easy_positives(const std::vector<PredictionOutcome>& outcomes,
                                       double cutoff = kEasyPositiveCutoff);

/// Bin index for a confidence: a value on an interior boundary k/n belongs to
/// bin k; 1.0 stays in the top bin.
std::size_t bin_index(double confidence, std::size_t n_bins);

/// Equal-width reliability bins and expected calibration error. Throws
/// kInvalidArgument on empty input.
CalibrationReport ece(const std::vector<PredictionOutcome>& outcomes,
                      std::size_t n_bins = kDefaultBins);

/// Weighted bin-gap sum recomputed from the bins alone.
double ece_from_bins(const std::vector<CalibrationBin>& bins);

/// collect -> exclude easy positives -> bin.
CalibrationReport calibrate(const CorrectorModel& model, const PairCorpus& corpus,
                            double cutoff = kEasyPositiveCutoff,
                            std::size_t n_bins = kDefaultBins);

// bin_lower,bin_upper,mean_confidence,accuracy,count
std::string reliability_csv(const CalibrationReport& report);

}  // namespace denoise
