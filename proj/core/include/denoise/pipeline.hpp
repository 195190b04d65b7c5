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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "denoise/augment.hpp"
#include "denoise/calibration.hpp"
#include "denoise/corrector.hpp"
#include "denoise/harness.hpp"
#include "denoise/world.hpp"

namespace denoise {

struct ExperimentConfig;

enum class FilterSource {
  kCross,      // filter model trained on the uniform-channel corpus D_r
  kSelf,       // filter model trained on the target corpus D_o
  kHeuristic,  // masked-context ratio rule, reverts flagged noisy edits
  kNone,       // no filtering
  kMixing,     // no filtering; final model trained on D_r + D_o
  kOracle,     // exact posterior under D_r's channel in the clean context
};

const char* to_string(FilterSource source) noexcept;
FilterSource parse_filter_source(std::string_view text);

struct FilterConfig {
  double threshold = 0.1;  // p of the keep/revert rule
  FilterSource source = FilterSource::kCross;
  double lambda_n = 0.9;
  double lambda_m = 0.8;
  // Flag noisy edits when the ratio is <= lambda_n instead of >= lambda_n.
  bool literal_noisy_rule = false;

  void validate() const;
};

struct EditRef {
  std::size_t record;
  std::size_t edit;
  auto operator<=>(const EditRef&) const = default;
};

struct FilterResult {
  PairCorpus corpus;
  std::size_t kept = 0;
  std::size_t reverted = 0;
};

/// Restore confidence of one edit.
using EditScorer = std::function<double(const CorruptionRecord&, std::size_t edit_index)>;

/// Keep an edit when its restore confidence c satisfies c >= p, otherwise put
/// the clean token back. Clean sides and unedited positions never change.
FilterResult filter_corpus(const PairCorpus& corpus, double threshold, const EditScorer& scorer);

/// Restore confidence = predict(model, Y, i)[x_i], scored on the corrupted
/// sentence as given.
FilterResult filter_corpus(const CorrectorModel& filter_model, const PairCorpus& corpus,
                           double threshold);

/// Reverts exactly the listed edits.
FilterResult revert_edits(const PairCorpus& corpus, const std::vector<EditRef>& edits);

/// min(q(x), q(y)) / max(q(x), q(y)); zero when both are zero.
double noisy_ratio(double q_original, double q_replacement);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Edits whose original and replacement are both plausible under the masked
/// context model. Sorted by (record, edit).
std::vector<EditRef> heuristic_noisy(const PairCorpus& corpus, const CorrectorModel& context_model,
                                     double lambda_n, bool literal_rule = false);

/// Edits sharing a misspelling with an edit of a different original in a
/// context of cosine similarity >= lambda_m, minus `flagged_noisy`.
std::vector<EditRef> heuristic_multi(const PairCorpus& corpus, const CorrectorModel& context_model,
                                     double lambda_m, const std::vector<EditRef>& flagged_noisy);

struct DetectionStats {
  std::size_t flagged = 0;
  std::size_t relevant = 0;  // planted edits of the target category
  std::size_t hits = 0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Flagged edits scored against planted category annotations.
DetectionStats detection_stats(const PairCorpus& corpus, const std::vector<EditRef>& flagged,
                               Category target);

/// Corpora, channels and the world shared by every variant of one seed.
struct PipelineContext {
  WorldModel world;
  ConfusionTable filter_table;  // uniform channel of D_r
  ConfusionTable target_table;  // long-tailed channel of D_o
  ConfusionTable eval_table;
  double rate = 0.1;
  PairCorpus d_r;
  PairCorpus d_o;  // annotated with planted categories
  PairCorpus eval;  // single-edit or clean sentences
};

/// World and channels, plus the three corpora when `with_corpora` is set.
PipelineContext build_context(const ExperimentConfig& config, bool with_corpora = true);

struct TrainedFilters {
  CorrectorModel cross;
  CorrectorModel self;
  CorrectorModel masked;
};

TrainedFilters train_filters(const PipelineContext& context, const ExperimentConfig& config);

struct PipelineReport {
  std::string variant;
  double threshold = 0.0;
  std::size_t kept_edits = 0;
  std::size_t reverted_edits = 0;
  CategoryRates category_rates;
  Metrics metrics_before;
  Metrics metrics_after;
  CalibrationReport calibration_before;
  CalibrationReport calibration_after;
};

/// One filter variant end to end: score D_o's edits, refine it with the
/// keep/revert rule, train the final model on the refined corpus and compare
/// it with the model trained on D_o as is, on the held-out eval set.
PipelineReport run_pipeline(const PipelineContext& context, const TrainedFilters& filters,
                            const ExperimentConfig& config, const FilterConfig& filter);

/// Builds the context and filters from scratch, then runs config.filter.
PipelineReport run_pipeline(const ExperimentConfig& config);

CorrectorModel mixing_baseline(const PairCorpus& d_r, const PairCorpus& d_o, int vocab_size,
                               const Window& window, double alpha);

/// Mean TV distance between model predictions and the exact posterior under
/// `table` at every edited position of the (single-edit) corpus.
double mean_tv_to_oracle(const CorrectorModel& model, const WorldModel& world,
                         const ConfusionTable& table, const PairCorpus& corpus, double rate);

struct SweepPoint {
  double threshold = 0.0;
  std::size_t size = 0;  // training characters of the filter model
  Metrics metrics;
  CalibrationReport calibration;
  std::size_t reverted_edits = 0;
  double noisy_removal = 0.0;
  double filter_tv = 0.0;
};

/// One pipeline run per threshold, all sharing the trained filter model.
std::vector<SweepPoint> threshold_sweep(const PipelineContext& context,
                                        const TrainedFilters& filters,
                                        const ExperimentConfig& config,
                                        const std::vector<double>& thresholds);

/// Cross-filter trained on growing prefixes of the uniform-channel stream,
/// each applied at `threshold`. Sizes are training characters, ascending.
std::vector<SweepPoint> volume_sweep(const PipelineContext& context,
                                     const ExperimentConfig& config,
                                     const std::vector<std::size_t>& sizes, double threshold);

}  // namespace denoise
