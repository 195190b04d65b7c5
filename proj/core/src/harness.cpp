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
#include "denoise/harness.hpp"

#include <cstdio>
#include <fstream>

#include "denoise/hashing.hpp"
#include "json.hpp"

#ifndef DENOISE_VERSION
#define DENOISE_VERSION "0.0.0"
#endif

namespace denoise {
namespace {

double percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string format_general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

}  // namespace

std::string format_double(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

Metrics score_outputs(const PairCorpus& corpus, const std::vector<Sentence>& outputs) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot evaluate an empty corpus");
  if (outputs.size() != corpus.size()) throw Error(ErrorCode::kMisaligned, "one output per sentence expected");
  Metrics m;
  std::size_t characters = 0;
  std::size_t correct_characters = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& record = corpus[k];
    const auto& out = outputs[k];
    if (out.size() != record.corrupted.size()) throw Error(ErrorCode::kMisaligned, "output length differs");
    const bool has_error = record.clean != record.corrupted;
    const bool modified = out != record.corrupted;
    bool has_correct_char = false;
    bool broke_correct_char = false;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (record.corrupted[j] == record.clean[j]) {
        has_correct_char = true;
        if (out[j] != record.corrupted[j]) broke_correct_char = true;
      }
      correct_characters += out[j] == record.clean[j] ? 1 : 0;
    }
    characters += out.size();
    ++m.n_sentences;
    (has_error ? m.n_err_sentences : m.n_clean_sentences) += 1;
    m.n_modified += modified ? 1 : 0;
    if (has_error && modified && out == record.clean) ++m.tp;
    m.n_fpr_denominator += has_correct_char ? 1 : 0;
    m.n_false_positive += broke_correct_char ? 1 : 0;
  }
  m.fp_mod = m.n_modified - m.tp;
  m.fn = m.n_err_sentences - m.tp;
  m.precision = percent(m.tp, m.n_modified);
  m.recall = percent(m.tp, m.n_err_sentences);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.fpr = percent(m.n_false_positive, m.n_fpr_denominator);
  m.char_accuracy = percent(correct_characters, characters);
  return m;
}

Metrics evaluate(const CorrectorModel& model, const PairCorpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot evaluate an empty corpus");
  std::vector<Sentence> outputs;
  outputs.reserve(corpus.size());
  for (const auto& record : corpus) outputs.push_back(model.correct(record.corrupted));
  return score_outputs(corpus, outputs);
}

CategoryRates category_filter_rates(const PairCorpus& before, const PairCorpus& after) {
  if (before.size() != after.size()) throw Error(ErrorCode::kMisaligned, "corpora differ in size");
  CategoryRates rates;
  for (std::size_t k = 0; k < before.size(); ++k) {
    const auto& b = before[k];
    const auto& a = after[k];
    if (b.clean != a.clean || a.corrupted.size() != b.corrupted.size()) {
      throw Error(ErrorCode::kMisaligned, "record " + std::to_string(k) + " has a different clean side");
    }
    for (std::size_t j = 0; j < a.corrupted.size(); ++j) {
      if (a.corrupted[j] != b.corrupted[j] && a.corrupted[j] != b.clean[j]) {
        throw Error(ErrorCode::kMisaligned, "record " + std::to_string(k) + " was not produced by filtering");
      }
    }
    if (b.categories.size() != b.edits.size()) {
      throw Error(ErrorCode::kInvalidArgument, "category annotations are missing");
    }
    for (std::size_t e = 0; e < b.edits.size(); ++e) {
      auto& slot = rates.by_category[static_cast<std::size_t>(b.categories[e])];
      const std::size_t pos = b.edits[e].position;
      const bool reverted = a.corrupted[pos] == b.clean[pos];
      ++slot.total;
      ++rates.total_edits;
      if (reverted) {
        ++slot.reverted;
        ++rates.total_reverted;
      }
    }
  }
  for (auto& slot : rates.by_category) {
    slot.ratio = slot.total == 0 ? 0.0 : static_cast<double>(slot.reverted) / static_cast<double>(slot.total);
  }
  return rates;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "variant,p,size,P,R,F1,FPR,ECE,seed\n";
  for (const auto& r : rows) {
    out += r.variant + ',' + format_general(r.p) + ',' + std::to_string(r.size) + ',' +
           format_double(r.metrics.precision, 4) + ',' + format_double(r.metrics.recall, 4) + ',' +
           format_double(r.metrics.f1, 4) + ',' + format_double(r.metrics.fpr, 4) + ',' +
           format_double(r.ece, 6) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string manifest_json(const ReportArtifacts& artifacts) {
  nlohmann::ordered_json doc;
  doc["command"] = artifacts.command;
  doc["config_hash"] = artifacts.config_hash;
  doc["seed"] = artifacts.seed;
  doc["versions"] = {{"denoise", DENOISE_VERSION}};
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& [name, contents] : artifacts.files) files[name] = sha256_hex(contents);
  doc["files"] = std::move(files);
  return doc.dump(2) + "\n";
}

void emit_report(const ReportArtifacts& artifacts, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& contents) {
    std::ofstream file(out_dir / name, std::ios::binary | std::ios::trunc);
    file.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!file) throw Error(ErrorCode::kIo, "cannot write " + (out_dir / name).string());
  };
  for (const auto& [name, contents] : artifacts.files) write(name, contents);
  write("manifest.json", manifest_json(artifacts));
}

}  // namespace denoise
