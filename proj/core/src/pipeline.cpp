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
#include "denoise/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "denoise/config.hpp"
#include "denoise/oracle.hpp"

namespace denoise {
namespace {

void check_threshold(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::kInvalidConfig, "threshold p must lie in (0, 1)");
}

void drop_edit(CorruptionRecord& record, std::size_t edit_index) {
  const Edit& e = record.edits[edit_index];
  record.corrupted[e.position] = record.clean[e.position];
  record.edits.erase(record.edits.begin() + static_cast<std::ptrdiff_t>(edit_index));
  if (!record.categories.empty()) {
    record.categories.erase(record.categories.begin() + static_cast<std::ptrdiff_t>(edit_index));
  }
}

CorpusConfig corpus_config(const ExperimentConfig& config, std::size_t n, std::string stream) {
  CorpusConfig c;
  c.n_sentences = n;
  c.length = config.length;
  c.rate = config.rate;
  c.seed = config.seed;
  c.stream = std::move(stream);
  return c;
}

}  // namespace

const char* to_string(FilterSource source) noexcept {
  switch (source) {
    case FilterSource::kCross: return "cross";
    case FilterSource::kSelf: return "self";
    case FilterSource::kHeuristic: return "heuristic";
    case FilterSource::kNone: return "none";
    case FilterSource::kMixing: return "mixing";
    case FilterSource::kOracle: return "oracle";
  }
  return "unknown";
}

FilterSource parse_filter_source(std::string_view text) {
  for (auto s : {FilterSource::kCross, FilterSource::kSelf, FilterSource::kHeuristic, FilterSource::kNone,
                 FilterSource::kMixing, FilterSource::kOracle}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown filter mode '" + std::string(text) + "'");
}

void FilterConfig::validate() const {
  check_threshold(threshold);
  if (!(lambda_n > 0.0 && lambda_n <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "lambda_n must lie in (0, 1]");
  if (!(lambda_m >= -1.0 && lambda_m <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "lambda_m must lie in [-1, 1]");
}

FilterResult filter_corpus(const PairCorpus& corpus, double threshold, const EditScorer& scorer) {
  check_threshold(threshold);
  FilterResult result;
  result.corpus.reserve(corpus.size());
  for (const auto& record : corpus) {
    CorruptionRecord refined = record;
    // every edit is scored against the corrupted sentence as given
    for (std::size_t e = record.edits.size(); e-- > 0;) {
      if (scorer(record, e) >= threshold) {
        ++result.kept;
      } else {
        drop_edit(refined, e);
        ++result.reverted;
      }
    }
    result.corpus.push_back(std::move(refined));
  }
  return result;
}

FilterResult filter_corpus(const CorrectorModel& filter_model, const PairCorpus& corpus, double threshold) {
  return filter_corpus(corpus, threshold, [&](const CorruptionRecord& record, std::size_t e) {
    const Edit& edit = record.edits[e];
    return filter_model.predict(record.corrupted, edit.position)[edit.original];
  });
}

FilterResult revert_edits(const PairCorpus& corpus, const std::vector<EditRef>& edits) {
  const std::set<EditRef> chosen(edits.begin(), edits.end());
  FilterResult result;
  result.corpus = corpus;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    for (std::size_t e = corpus[k].edits.size(); e-- > 0;) {
      if (chosen.count({k, e})) {
        drop_edit(result.corpus[k], e);
        ++result.reverted;
      } else {
        ++result.kept;
      }
    }
  }
  return result;
}

double noisy_ratio(double q_original, double q_replacement) {
  const double hi = std::max(q_original, q_replacement);
  if (hi <= 0.0) return 0.0;
  return std::min(q_original, q_replacement) / hi;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "vectors differ in size");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::vector<EditRef> heuristic_noisy(const PairCorpus& corpus, const CorrectorModel& context_model,
                                     double lambda_n, bool literal_rule) {
  std::vector<EditRef> flagged;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& record = corpus[k];
    for (std::size_t e = 0; e < record.edits.size(); ++e) {
      const Edit& edit = record.edits[e];
      const auto q = context_model.predict(record.corrupted, edit.position);
      const double ratio = noisy_ratio(q[edit.original], q[edit.replacement]);
      if (literal_rule ? ratio <= lambda_n : ratio >= lambda_n) flagged.push_back({k, e});
    }
  }
  return flagged;
}

std::vector<EditRef> heuristic_multi(const PairCorpus& corpus, const CorrectorModel& context_model,
                                     double lambda_m, const std::vector<EditRef>& flagged_noisy) {
  // Edits in identical contexts share a context vector, so compare distinct
  // vectors per misspelling instead of all edit pairs.
  struct ContextGroup {
    std::vector<EditRef> edits;
    std::vector<Token> originals;
    std::set<Token> original_set;
  };
  std::map<Token, std::map<std::vector<double>, ContextGroup>> by_misspelling;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& record = corpus[k];
    for (std::size_t e = 0; e < record.edits.size(); ++e) {
      const Edit& edit = record.edits[e];
      auto& group = by_misspelling[edit.replacement][context_model.predict(record.corrupted, edit.position)];
      group.edits.push_back({k, e});
      group.originals.push_back(edit.original);
      group.original_set.insert(edit.original);
    }
  }

  const std::set<EditRef> noisy(flagged_noisy.begin(), flagged_noisy.end());
  std::set<EditRef> flagged;
  for (const auto& [misspelling, contexts] : by_misspelling) {
    std::vector<const std::vector<double>*> vectors;
    std::vector<const ContextGroup*> groups;
    for (const auto& [vec, group] : contexts) {
      vectors.push_back(&vec);
      groups.push_back(&group);
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = 0; j < groups.size(); ++j) {
        if (i != j && cosine_similarity(*vectors[i], *vectors[j]) < lambda_m) continue;
        const auto& partners = groups[j]->original_set;
        for (std::size_t n = 0; n < groups[i]->edits.size(); ++n) {
          const Token o = groups[i]->originals[n];
          const bool other_original = partners.size() > 1 || (partners.size() == 1 && *partners.begin() != o);
          if (other_original) flagged.insert(groups[i]->edits[n]);
        }
      }
    }
  }
  std::vector<EditRef> out;
  for (const auto& ref : flagged) {
    if (!noisy.count(ref)) out.push_back(ref);
  }
  return out;
}

DetectionStats detection_stats(const PairCorpus& corpus, const std::vector<EditRef>& flagged, Category target) {
  DetectionStats stats;
  for (const auto& record : corpus) {
    if (record.categories.size() != record.edits.size()) {
      throw Error(ErrorCode::kInvalidArgument, "category annotations are missing");
    }
    stats.relevant += static_cast<std::size_t>(std::count(record.categories.begin(), record.categories.end(), target));
  }
  stats.flagged = flagged.size();
  for (const auto& ref : flagged) {
    if (corpus.at(ref.record).categories.at(ref.edit) == target) ++stats.hits;
  }
  stats.precision = stats.flagged ? static_cast<double>(stats.hits) / static_cast<double>(stats.flagged) : 0.0;
  stats.recall = stats.relevant ? static_cast<double>(stats.hits) / static_cast<double>(stats.relevant) : 0.0;
  return stats;
}

PipelineContext build_context(const ExperimentConfig& config, bool with_corpora) {
  config.validate();
  WorldConfig wc;
  wc.vocab_size = config.vocab_size;
  wc.order = config.order;
  wc.seed = config.seed;
  wc.support = config.support;
  wc.weight_spread = config.weight_spread;

  ConfusionConfig cc;
  cc.candidates = config.candidates;
  cc.seed = config.seed;

  PipelineContext ctx{WorldModel::build(wc), ConfusionTable::build(config.vocab_size, cc),
                      ConfusionTable::build(config.vocab_size, cc), ConfusionTable::build(config.vocab_size, cc),
                      config.rate, {}, {}, {}};
  ctx.target_table = ctx.filter_table.reweighted(
      ChannelShape::kLongTailed, zipf_exponent_for_head_mass(config.candidates, config.target_head_mass));
  if (config.eval_shape == ChannelShape::kLongTailed) {
    ctx.eval_table = ctx.filter_table.reweighted(
        ChannelShape::kLongTailed, zipf_exponent_for_head_mass(config.candidates, config.eval_head_mass));
  }
  if (!with_corpora) return ctx;

  ctx.d_r = generate_corpus(ctx.world, ctx.filter_table, corpus_config(config, config.filter_sentences, "d_r"));
  auto target = corpus_config(config, config.target_sentences, "d_o");
  target.annotate = true;
  ctx.d_o = generate_corpus(ctx.world, ctx.target_table, target);
  auto held_out = corpus_config(config, config.eval_sentences, "eval");
  held_out.mode = CorruptionMode::kSingleEdit;
  held_out.annotate = true;
  held_out.corrupt_fraction = config.eval_error_fraction;
  ctx.eval = generate_corpus(ctx.world, ctx.eval_table, held_out);
  return ctx;
}

TrainedFilters train_filters(const PipelineContext& context, const ExperimentConfig& config) {
  return {CorrectorModel::train(context.d_r, config.vocab_size, config.window, config.alpha),
          CorrectorModel::train(context.d_o, config.vocab_size, config.window, config.alpha),
          CorrectorModel::train(context.d_r, config.vocab_size, Window::masked(), config.alpha)};
}

CorrectorModel mixing_baseline(const PairCorpus& d_r, const PairCorpus& d_o, int vocab_size,
                               const Window& window, double alpha) {
  if (d_r.empty() || d_o.empty()) throw Error(ErrorCode::kEmptyCorpus, "mixing needs two non-empty corpora");
  PairCorpus mixed;
  mixed.reserve(d_r.size() + d_o.size());
  mixed.insert(mixed.end(), d_r.begin(), d_r.end());
  mixed.insert(mixed.end(), d_o.begin(), d_o.end());
  return CorrectorModel::train(mixed, vocab_size, window, alpha);
}

PipelineReport run_pipeline(const PipelineContext& context, const TrainedFilters& filters,
                            const ExperimentConfig& config, const FilterConfig& filter) {
  filter.validate();
  PipelineReport report;
  report.variant = to_string(filter.source);
  report.threshold = filter.threshold;

  // The unfiltered baseline is the model trained on D_o as is, which is also
  // the self-filter.
  const CorrectorModel& baseline = filters.self;
  FilterResult refined;
  std::optional<CorrectorModel> final_model;
  switch (filter.source) {
    case FilterSource::kNone:
    case FilterSource::kMixing:
      refined.corpus = context.d_o;
      refined.kept = total_edits(context.d_o);
      break;
    case FilterSource::kCross:
      refined = filter_corpus(filters.cross, context.d_o, filter.threshold);
      break;
    case FilterSource::kSelf:
      refined = filter_corpus(filters.self, context.d_o, filter.threshold);
      break;
    case FilterSource::kHeuristic:
      refined = revert_edits(context.d_o, heuristic_noisy(context.d_o, filters.masked, filter.lambda_n,
                                                          filter.literal_noisy_rule));
      break;
    case FilterSource::kOracle:
      refined = filter_corpus(context.d_o, filter.threshold, [&](const CorruptionRecord& record, std::size_t e) {
        const Edit& edit = record.edits[e];
        return posterior_in_context(context.world, context.filter_table, record.clean, edit.position,
                                    edit.replacement, context.rate)
            .posterior;
      });
      break;
  }
  if (filter.source == FilterSource::kMixing) {
    final_model = mixing_baseline(context.d_r, context.d_o, config.vocab_size, config.window, config.alpha);
  } else if (filter.source != FilterSource::kNone) {
    final_model = CorrectorModel::train(refined.corpus, config.vocab_size, config.window, config.alpha);
  }
  const CorrectorModel& model = final_model ? *final_model : baseline;

  report.kept_edits = refined.kept;
  report.reverted_edits = refined.reverted;
  report.category_rates = category_filter_rates(context.d_o, refined.corpus);
  report.metrics_before = evaluate(baseline, context.eval);
  report.metrics_after = evaluate(model, context.eval);
  report.calibration_before = calibrate(baseline, context.eval);
  report.calibration_after = calibrate(model, context.eval);
  return report;
}

PipelineReport run_pipeline(const ExperimentConfig& config) {
  const auto context = build_context(config);
  const auto filters = train_filters(context, config);
  return run_pipeline(context, filters, config, config.filter);
}

double mean_tv_to_oracle(const CorrectorModel& model, const WorldModel& world, const ConfusionTable& table,
                         const PairCorpus& corpus, double rate) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& record : corpus) {
    for (const Edit& e : record.edits) {
      const auto oracle = posterior_distribution(world, table, record.corrupted, e.position, rate);
      total += total_variation(model.predict(record.corrupted, e.position), oracle);
      ++n;
    }
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

std::vector<SweepPoint> threshold_sweep(const PipelineContext& context, const TrainedFilters& filters,
                                        const ExperimentConfig& config, const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw Error(ErrorCode::kInvalidConfig, "threshold grid is empty");
  for (double p : thresholds) check_threshold(p);
  const double tv = mean_tv_to_oracle(filters.cross, context.world, context.filter_table, context.eval, context.rate);
  std::vector<SweepPoint> points;
  for (double p : thresholds) {
    const auto refined = filter_corpus(filters.cross, context.d_o, p);
    const auto model = CorrectorModel::train(refined.corpus, config.vocab_size, config.window, config.alpha);
    SweepPoint point;
    point.threshold = p;
    point.size = total_characters(context.d_r);
    point.metrics = evaluate(model, context.eval);
    point.calibration = calibrate(model, context.eval);
    point.reverted_edits = refined.reverted;
    point.noisy_removal = category_filter_rates(context.d_o, refined.corpus)[Category::kNoisy].ratio;
    point.filter_tv = tv;
    points.push_back(std::move(point));
  }
  return points;
}

std::vector<SweepPoint> volume_sweep(const PipelineContext& context, const ExperimentConfig& config,
                                     const std::vector<std::size_t>& sizes, double threshold) {
  check_threshold(threshold);
  if (sizes.empty() || !std::is_sorted(sizes.begin(), sizes.end()) || sizes.front() == 0) {
    throw Error(ErrorCode::kInvalidConfig, "volume sizes must be positive and ascending");
  }
  std::vector<SweepPoint> points;
  for (std::size_t size : sizes) {
    const auto d_r = generate_corpus_characters(context.world, context.filter_table,
                                                corpus_config(config, 0, "d_r"), size);
    const auto filter_model = CorrectorModel::train(d_r, config.vocab_size, config.window, config.alpha);
    const auto refined = filter_corpus(filter_model, context.d_o, threshold);
    const auto model = CorrectorModel::train(refined.corpus, config.vocab_size, config.window, config.alpha);
    SweepPoint point;
    point.threshold = threshold;
    point.size = size;
    point.metrics = evaluate(model, context.eval);
    point.calibration = calibrate(model, context.eval);
    point.reverted_edits = refined.reverted;
    point.noisy_removal = category_filter_rates(context.d_o, refined.corpus)[Category::kNoisy].ratio;
    point.filter_tv = mean_tv_to_oracle(filter_model, context.world, context.filter_table, context.eval, context.rate);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace denoise
