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
#include "denoise_cli/cli.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "denoise/calibration.hpp"
#include "denoise/config.hpp"
#include "denoise/hashing.hpp"
#include "denoise/harness.hpp"
#include "denoise/oracle.hpp"
#include "denoise/pipeline.hpp"

namespace denoise::cli {
namespace {

struct Options {
  std::string config_path;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out_dir = "out";
  double threshold = 0.0;
  bool has_threshold = false;
  std::string mode;
  std::string model_path;
  std::string corpus_path;
};

struct Run {
  ExperimentConfig config;
  std::string config_hash;
  Options options;
};

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

Run load(const Options& options) {
  Run run{{}, {}, options};
  if (!options.config_path.empty()) {
    const std::string bytes = read_file(options.config_path);
    run.config = ExperimentConfig::from_json(bytes);
    run.config_hash = sha256_hex(bytes);
  } else {
    run.config_hash = sha256_hex(run.config.to_json());
  }
  if (options.has_seed) run.config.seed = options.seed;
  if (options.has_threshold) run.config.filter.threshold = options.threshold;
  if (!options.mode.empty()) run.config.filter.source = parse_filter_source(options.mode);
  run.config.validate();
  return run;
}

std::string num(double value) { return format_double(value, 17); }

std::string category_rates_csv(const std::vector<std::pair<std::string, CategoryRates>>& rows) {
  std::string out = "variant,category,total,reverted,ratio\n";
  for (const auto& [variant, rates] : rows) {
    for (auto c : {Category::kTrue, Category::kNoisy, Category::kMultiAnswer}) {
      const auto& r = rates[c];
      out += variant + "," + to_string(c) + "," + std::to_string(r.total) + "," + std::to_string(r.reverted) + "," +
             num(r.ratio) + "\n";
    }
  }
  return out;
}

std::string detection_csv(const std::vector<std::pair<std::string, DetectionStats>>& rows) {
  std::string out = "detector,flagged,relevant,hits,precision,recall\n";
  for (const auto& [name, s] : rows) {
    out += name + "," + std::to_string(s.flagged) + "," + std::to_string(s.relevant) + "," +
           std::to_string(s.hits) + "," + num(s.precision) + "," + num(s.recall) + "\n";
  }
  return out;
}

std::string corpus_stats_csv(const std::vector<std::pair<std::string, const PairCorpus*>>& corpora) {
  std::string out = "corpus,sentences,characters,edits,annotated,true,noisy,multi_answer\n";
  for (const auto& [name, corpus] : corpora) {
    std::array<std::size_t, 3> counts{};
    bool annotated = !corpus->empty();
    for (const auto& record : *corpus) {
      if (record.categories.size() != record.edits.size()) annotated = false;
      for (Category c : record.categories) ++counts[static_cast<std::size_t>(c)];
    }
    out += name + "," + std::to_string(corpus->size()) + "," + std::to_string(total_characters(*corpus)) + "," +
           std::to_string(total_edits(*corpus)) + "," + (annotated ? "1" : "0") + "," + std::to_string(counts[0]) +
           "," + std::to_string(counts[1]) + "," + std::to_string(counts[2]) + "\n";
  }
  return out;
}

MetricsRow row(std::string variant, double p, std::size_t size, const Metrics& metrics,
               const CalibrationReport& calibration, std::uint64_t seed) {
  return {std::move(variant), p, size, metrics, calibration.ece, seed};
}

ReportArtifacts artifacts(const Run& run, const std::string& command) {
  ReportArtifacts a;
  a.config_hash = run.config_hash;
  a.seed = run.config.seed;
  a.command = command;
  a.files["config.json"] = run.config.to_json();
  return a;
}

PairCorpus input_corpus(const Run& run, const PairCorpus& fallback) {
  if (run.options.corpus_path.empty()) return fallback;
  return corpus_from_jsonl(read_file(run.options.corpus_path));
}

FilterResult apply_filter(const PipelineContext& ctx, const TrainedFilters& filters, const FilterConfig& filter,
                          const PairCorpus& corpus) {
  switch (filter.source) {
    case FilterSource::kCross:
      return filter_corpus(filters.cross, corpus, filter.threshold);
    case FilterSource::kSelf:
      return filter_corpus(filters.self, corpus, filter.threshold);
    case FilterSource::kHeuristic:
      return revert_edits(corpus, heuristic_noisy(corpus, filters.masked, filter.lambda_n, filter.literal_noisy_rule));
    case FilterSource::kOracle:
      return filter_corpus(corpus, filter.threshold, [&](const CorruptionRecord& record, std::size_t e) {
        const Edit& edit = record.edits[e];
        return posterior_in_context(ctx.world, ctx.filter_table, record.clean, edit.position, edit.replacement,
                                    ctx.rate)
            .posterior;
      });
    case FilterSource::kNone:
    case FilterSource::kMixing:
      break;
  }
  FilterResult unchanged;
  unchanged.corpus = corpus;
  unchanged.kept = total_edits(corpus);
  return unchanged;
}

ReportArtifacts gen_world(const Run& run) {
  const auto ctx = build_context(run.config, false);
  auto a = artifacts(run, "gen-world");
  a.files["world.json"] = ctx.world.to_json();
  a.files["confusion_uniform.json"] = ctx.filter_table.to_json();
  a.files["confusion_long_tailed.json"] = ctx.target_table.to_json();
  a.files["confusion_eval.json"] = ctx.eval_table.to_json();
  return a;
}

ReportArtifacts gen_corpus(const Run& run) {
  const auto ctx = build_context(run.config);
  auto a = artifacts(run, "gen-corpus");
  a.files["d_r.jsonl"] = corpus_to_jsonl(ctx.d_r);
  a.files["d_o.jsonl"] = corpus_to_jsonl(ctx.d_o);
  a.files["eval.jsonl"] = corpus_to_jsonl(ctx.eval);
  a.files["corpus_stats.csv"] = corpus_stats_csv({{"d_r", &ctx.d_r}, {"d_o", &ctx.d_o}, {"eval", &ctx.eval}});
  return a;
}

ReportArtifacts train(const Run& run) {
  const auto ctx = build_context(run.config);
  const auto filters = train_filters(ctx, run.config);
  auto a = artifacts(run, "train");
  std::string summary = "model,corpus_hash,signatures,observations,eval_ce_loss\n";
  for (const auto& [name, model] : std::vector<std::pair<std::string, const CorrectorModel*>>{
           {"uniform", &filters.cross}, {"long_tailed", &filters.self}, {"masked", &filters.masked}}) {
    a.files["model_" + name + ".json"] = model->to_json();
    summary += name + "," + model->corpus_hash() + "," + std::to_string(model->signature_count()) + "," +
               std::to_string(model->observations()) + "," + num(model->ce_loss(ctx.eval)) + "\n";
  }
  a.files["train_summary.csv"] = summary;
  return a;
}

ReportArtifacts score(const Run& run) {
  const FilterSource source = run.config.filter.source;
  if (source == FilterSource::kNone || source == FilterSource::kMixing) {
    throw Error(ErrorCode::kInvalidArgument, "score needs a filter mode: cross, self, heuristic or oracle");
  }
  const auto ctx = build_context(run.config);
  const auto filters = train_filters(ctx, run.config);
  const PairCorpus corpus = input_corpus(run, ctx.d_o);

  std::string scores;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& record = corpus[k];
    for (std::size_t e = 0; e < record.edits.size(); ++e) {
      const Edit& edit = record.edits[e];
      const double oracle = posterior_in_context(ctx.world, ctx.filter_table, record.clean, edit.position,
                                                 edit.replacement, ctx.rate)
                                .posterior;
      double confidence = oracle;
      if (source == FilterSource::kCross || source == FilterSource::kSelf) {
        const auto& model = source == FilterSource::kCross ? filters.cross : filters.self;
        confidence = model.predict(record.corrupted, edit.position)[edit.original];
      } else if (source == FilterSource::kHeuristic) {
        const auto q = filters.masked.predict(record.corrupted, edit.position);
        confidence = noisy_ratio(q[edit.original], q[edit.replacement]);
      }
      scores += "{\"record\":" + std::to_string(k) + ",\"edit\":" + std::to_string(e) +
                ",\"position\":" + std::to_string(edit.position) + ",\"original\":" + std::to_string(edit.original) +
                ",\"replacement\":" + std::to_string(edit.replacement) + ",\"category\":" +
                (record.categories.size() == record.edits.size()
                     ? std::to_string(static_cast<int>(record.categories[e]))
                     : std::string("null")) +
                ",\"confidence\":" + num(confidence) + ",\"oracle\":" + num(oracle) + "}\n";
    }
  }
  std::string posteriors;
  for (const auto& record : ctx.eval) {
    if (record.edits.size() == 1) {
      posteriors += posterior_report_to_json(posterior(ctx.world, ctx.eval_table, record, 0, ctx.rate)) + "\n";
    }
  }
  auto a = artifacts(run, "score");
  a.files["scores.jsonl"] = scores;
  a.files["eval_posteriors.jsonl"] = posteriors;
  return a;
}

ReportArtifacts filter(const Run& run) {
  const auto ctx = build_context(run.config);
  const auto filters = train_filters(ctx, run.config);
  const PairCorpus corpus = input_corpus(run, ctx.d_o);
  const auto& fc = run.config.filter;
  const auto result = apply_filter(ctx, filters, fc, corpus);

  auto a = artifacts(run, "filter");
  a.files["d_prime.jsonl"] = corpus_to_jsonl(result.corpus);
  a.files["filter_summary.csv"] = std::string("mode,threshold,kept,reverted\n") + to_string(fc.source) + "," +
                                  num(fc.threshold) + "," + std::to_string(result.kept) + "," +
                                  std::to_string(result.reverted) + "\n";
  const bool annotated = std::all_of(corpus.begin(), corpus.end(), [](const CorruptionRecord& r) {
    return r.categories.size() == r.edits.size();
  });
  if (annotated) {
    a.files["category_rates.csv"] =
        category_rates_csv({{to_string(fc.source), category_filter_rates(corpus, result.corpus)}});
  }
  if (fc.source == FilterSource::kHeuristic && annotated) {
    const auto noisy = heuristic_noisy(corpus, filters.masked, fc.lambda_n, fc.literal_noisy_rule);
    const auto multi = heuristic_multi(corpus, filters.masked, fc.lambda_m, noisy);
    a.files["heuristics.csv"] = detection_csv({{"noisy", detection_stats(corpus, noisy, Category::kNoisy)},
                                               {"multi_answer", detection_stats(corpus, multi, Category::kMultiAnswer)}});
  }
  return a;
}

ReportArtifacts pipeline(const Run& run) {
  const auto ctx = build_context(run.config);
  const auto filters = train_filters(ctx, run.config);
  const auto report = run_pipeline(ctx, filters, run.config, run.config.filter);
  const std::size_t size = total_characters(ctx.d_r);
  const std::uint64_t seed = run.config.seed;

  auto a = artifacts(run, "pipeline");
  a.files["metrics.csv"] =
      metrics_csv({row("baseline", report.threshold, size, report.metrics_before, report.calibration_before, seed),
                   row(report.variant, report.threshold, size, report.metrics_after, report.calibration_after, seed)});
  a.files["reliability_before.csv"] = reliability_csv(report.calibration_before);
  a.files["reliability_after.csv"] = reliability_csv(report.calibration_after);
  a.files["category_rates.csv"] = category_rates_csv({{report.variant, report.category_rates}});
  a.files["pipeline_summary.csv"] = "variant,threshold,kept,reverted\n" + report.variant + "," +
                                    num(report.threshold) + "," + std::to_string(report.kept_edits) + "," +
                                    std::to_string(report.reverted_edits) + "\n";
  return a;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "p,size,reverted,noisy_removal,filter_tv\n";
  for (const auto& point : points) {
    out += num(point.threshold) + "," + std::to_string(point.size) + "," + std::to_string(point.reverted_edits) +
           "," + num(point.noisy_removal) + "," + num(point.filter_tv) + "\n";
  }
  return out;
}

std::vector<MetricsRow> sweep_rows(const std::string& variant, const std::vector<SweepPoint>& points,
                                   std::uint64_t seed) {
  std::vector<MetricsRow> rows;
  for (const auto& point : points) rows.push_back(row(variant, point.threshold, point.size, point.metrics, point.calibration, seed));
  return rows;
}

ReportArtifacts sweep_threshold(const Run& run) {
  const auto ctx = build_context(run.config);
  const auto filters = train_filters(ctx, run.config);
  const auto points = threshold_sweep(ctx, filters, run.config, run.config.thresholds);
  auto a = artifacts(run, "sweep-threshold");
  a.files["metrics.csv"] = metrics_csv(sweep_rows("cross", points, run.config.seed));
  a.files["sweep_threshold.csv"] = sweep_csv(points);
  return a;
}

ReportArtifacts sweep_volume(const Run& run) {
  const auto ctx = build_context(run.config);
  const double p = run.options.has_threshold ? run.config.filter.threshold : run.config.volume_threshold;
  const auto points = volume_sweep(ctx, run.config, run.config.volume_characters, p);
  auto a = artifacts(run, "sweep-volume");
  a.files["metrics.csv"] = metrics_csv(sweep_rows("cross", points, run.config.seed));
  a.files["sweep_volume.csv"] = sweep_csv(points);
  return a;
}

ReportArtifacts eval(const Run& run) {
  const auto ctx = build_context(run.config);
  const std::size_t size = total_characters(ctx.d_r);
  const std::uint64_t seed = run.config.seed;
  auto a = artifacts(run, "eval");
  std::vector<MetricsRow> rows;
  auto add = [&](const std::string& name, const CorrectorModel& model) {
    const auto calibration = calibrate(model, ctx.eval);
    rows.push_back(row(name, 0.0, size, evaluate(model, ctx.eval), calibration, seed));
    a.files["reliability_" + name + ".csv"] = reliability_csv(calibration);
  };
  if (!run.options.model_path.empty()) {
    add("model", CorrectorModel::from_json(read_file(run.options.model_path)));
  } else {
    const auto& c = run.config;
    add("uniform", CorrectorModel::train(ctx.d_r, c.vocab_size, c.window, c.alpha));
    add("long_tailed", CorrectorModel::train(ctx.d_o, c.vocab_size, c.window, c.alpha));
    add("mixing", mixing_baseline(ctx.d_r, ctx.d_o, c.vocab_size, c.window, c.alpha));
  }
  a.files["metrics.csv"] = metrics_csv(rows);
  return a;
}

ReportArtifacts report(const Run& run) {
  const auto& config = run.config;
  const auto ctx = build_context(config);
  const auto filters = train_filters(ctx, config);
  const std::size_t size = total_characters(ctx.d_r);
  const std::uint64_t seed = config.seed;
  auto a = artifacts(run, "report");

  std::vector<MetricsRow> rows;
  std::vector<std::pair<std::string, CategoryRates>> rates;
  std::string summary = "variant,threshold,kept,reverted\n";
  bool baseline_done = false;
  for (auto source : {FilterSource::kNone, FilterSource::kCross, FilterSource::kSelf, FilterSource::kHeuristic,
                      FilterSource::kMixing, FilterSource::kOracle}) {
    FilterConfig fc = config.filter;
    fc.source = source;
    const auto r = run_pipeline(ctx, filters, config, fc);
    if (!baseline_done) {
      rows.push_back(row("baseline", fc.threshold, size, r.metrics_before, r.calibration_before, seed));
      a.files["reliability_baseline.csv"] = reliability_csv(r.calibration_before);
      baseline_done = true;
    }
    if (source != FilterSource::kNone) {
      rows.push_back(row(r.variant, fc.threshold, size, r.metrics_after, r.calibration_after, seed));
      a.files["reliability_" + r.variant + ".csv"] = reliability_csv(r.calibration_after);
    }
    rates.emplace_back(r.variant, r.category_rates);
    summary += r.variant + "," + num(fc.threshold) + "," + std::to_string(r.kept_edits) + "," +
               std::to_string(r.reverted_edits) + "\n";
  }

  const auto uniform_cal = calibrate(filters.cross, ctx.eval);
  rows.push_back(row("uniform_channel", 0.0, size, evaluate(filters.cross, ctx.eval), uniform_cal, seed));
  a.files["reliability_uniform_channel.csv"] = reliability_csv(uniform_cal);

  const auto thresholds = threshold_sweep(ctx, filters, config, config.thresholds);
  const auto volumes = volume_sweep(ctx, config, config.volume_characters, config.volume_threshold);
  for (auto& r : sweep_rows("sweep_threshold", thresholds, seed)) rows.push_back(std::move(r));
  for (auto& r : sweep_rows("sweep_volume", volumes, seed)) rows.push_back(std::move(r));

  const auto noisy = heuristic_noisy(ctx.d_o, filters.masked, config.filter.lambda_n, config.filter.literal_noisy_rule);
  const auto multi = heuristic_multi(ctx.d_o, filters.masked, config.filter.lambda_m, noisy);

  a.files["metrics.csv"] = metrics_csv(rows);
  a.files["category_rates.csv"] = category_rates_csv(rates);
  a.files["pipeline_summary.csv"] = summary;
  a.files["sweep_threshold.csv"] = sweep_csv(thresholds);
  a.files["sweep_volume.csv"] = sweep_csv(volumes);
  a.files["heuristics.csv"] = detection_csv({{"noisy", detection_stats(ctx.d_o, noisy, Category::kNoisy)},
                                             {"multi_answer", detection_stats(ctx.d_o, multi, Category::kMultiAnswer)}});
  a.files["corpus_stats.csv"] = corpus_stats_csv({{"d_r", &ctx.d_r}, {"d_o", &ctx.d_o}, {"eval", &ctx.eval}});
  return a;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic corpus denoising experiments"};
  app.name("denoise");
  app.require_subcommand(1);
  Options options;
  app.add_option("--config", options.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  auto* seed = app.add_option("--seed", options.seed, "master seed");
  app.add_option("--out-dir", options.out_dir, "output directory")->capture_default_str();
  auto* threshold = app.add_option("--threshold", options.threshold, "filter threshold p in (0, 1)");
  app.add_option("--mode", options.mode, "filter mode")
      ->check(CLI::IsMember({"cross", "self", "heuristic", "none", "mixing", "oracle"}));
  app.add_option("--model", options.model_path, "model JSON to evaluate (eval)")->check(CLI::ExistingFile);
  app.add_option("--corpus", options.corpus_path, "pair-corpus JSONL to score or filter")
      ->check(CLI::ExistingFile);

  const std::vector<std::pair<std::string, std::pair<std::string, std::function<ReportArtifacts(const Run&)>>>>
      commands{
          {"gen-world", {"world and confusion tables", gen_world}},
          {"gen-corpus", {"uniform, long-tailed and eval corpora", gen_corpus}},
          {"train", {"corrector models on each corpus", train}},
          {"score", {"restore confidence of every target-corpus edit", score}},
          {"filter", {"refined target corpus", filter}},
          {"pipeline", {"filter, retrain and evaluate one variant", pipeline}},
          {"sweep-threshold", {"pipeline over the threshold grid", sweep_threshold}},
          {"sweep-volume", {"pipeline over filter training sizes", sweep_volume}},
          {"eval", {"metrics and calibration of channel-trained models", eval}},
          {"report", {"every variant, sweep and calibration table", report}},
      };
  std::map<CLI::App*, const std::function<ReportArtifacts(const Run&)>*> handlers;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->fallthrough();
    handlers[sub] = &entry.second;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  options.has_seed = seed->count() > 0;
  options.has_threshold = threshold->count() > 0;

  try {
    const Run loaded = load(options);
    for (const auto& [sub, handler] : handlers) {
      if (!sub->parsed()) continue;
      const auto result = (*handler)(loaded);
      emit_report(result, options.out_dir);
      out << "wrote " << result.files.size() + 1 << " files to " << options.out_dir << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace denoise::cli
