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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "denoise/augment.hpp"
#include "denoise/corrector.hpp"

namespace denoise {

/// Sentence-level correction metrics, all rates in percent.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double char_accuracy = 0.0;

  std::size_t tp = 0;              // erroneous sentences restored exactly
  std::size_t fp_mod = 0;          // modified sentences that are not a TP
  std::size_t fn = 0;              // erroneous sentences not restored
  std::size_t n_err_sentences = 0;
  std::size_t n_clean_sentences = 0;
  std::size_t n_modified = 0;
  std::size_t n_false_positive = 0;  // sentences with a correct token modified
  std::size_t n_fpr_denominator = 0;
  std::size_t n_sentences = 0;

  bool operator==(const Metrics&) const = default;
};

/// Scores given outputs against a corpus (outputs[k] corrects corpus[k]).
Metrics score_outputs(const PairCorpus& corpus, const std::vector<Sentence>& outputs);

/// Runs model.correct() over the corpus and scores the result.
Metrics evaluate(const CorrectorModel& model, const PairCorpus& corpus);

struct CategoryRate {
  std::size_t total = 0;
  std::size_t reverted = 0;
  double ratio = 0.0;
};

struct CategoryRates {
  std::array<CategoryRate, 3> by_category{};  // indexed by Category
  std::size_t total_edits = 0;
  std::size_t total_reverted = 0;

  const CategoryRate& operator[](Category c) const {
    return by_category[static_cast<std::size_t>(c)];
  }
};

/// Fraction of each category's edits that filtering reverted. `before` must
/// carry category annotations; `after` must share its clean side.
CategoryRates category_filter_rates(const PairCorpus& before, const PairCorpus& after);

struct MetricsRow {
  std::string variant;
  double p = 0.0;
  std::size_t size = 0;
  Metrics metrics;
  double ece = 0.0;
  std::uint64_t seed = 0;
};

// variant,p,size,P,R,F1,FPR,ECE,seed
std::string metrics_csv(const std::vector<MetricsRow>& rows);

/// Output files of one run plus a manifest.json binding them to the config
/// hash and seed. File contents depend only on their inputs.
struct ReportArtifacts {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string command;
  std::map<std::string, std::string> files;  // file name -> contents
};

std::string manifest_json(const ReportArtifacts& artifacts);

/// Writes every file and manifest.json under `out_dir`; throws kIo when the
/// directory cannot be created or written.
void emit_report(const ReportArtifacts& artifacts, const std::filesystem::path& out_dir);

std::string format_double(double value, int digits = 6);

}  // namespace denoise
