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
#include "denoise/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace denoise {
namespace {

using nlohmann::json;

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorCode::kInvalidArgument, "rate must lie in [0, 1)");
}

void append_ids(std::string& out, const Sentence& tokens) {
  out.push_back('[');
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(tokens[i]);
  }
  out.push_back(']');
}

}  // namespace

const char* to_string(ChannelShape shape) noexcept {
  return shape == ChannelShape::kUniform ? "uniform" : "long_tailed";
}

ChannelShape parse_channel_shape(std::string_view text) {
  if (text == "uniform") return ChannelShape::kUniform;
  if (text == "long_tailed") return ChannelShape::kLongTailed;
  throw Error(ErrorCode::kInvalidConfig, "unknown channel shape '" + std::string(text) + "'");
}

const char* to_string(Category category) noexcept {
  switch (category) {
    case Category::kTrue: return "true";
    case Category::kNoisy: return "noisy";
    case Category::kMultiAnswer: return "multi_answer";
  }
  return "unknown";
}

std::vector<double> zipf_weights(int count, double exponent) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "zipf needs at least one rank");
  std::vector<double> w(static_cast<std::size_t>(count));
  double total = 0.0;
  for (int k = 0; k < count; ++k) {
    w[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k + 1), -exponent);
    total += w[static_cast<std::size_t>(k)];
  }
  for (double& x : w) x /= total;
  return w;
}

double zipf_head_mass(int count, double exponent) { return zipf_weights(count, exponent).front(); }

double zipf_exponent_for_head_mass(int count, double head_mass) {
  if (count == 1) return 0.0;
  const double floor_mass = 1.0 / count;
  if (!(head_mass >= floor_mass - 1e-15 && head_mass < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "head mass must lie in [1/c, 1)");
  }
  if (head_mass <= floor_mass) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (zipf_head_mass(count, hi) < head_mass) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (zipf_head_mass(count, mid) < head_mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ConfusionTable ConfusionTable::build(int vocab_size, const ConfusionConfig& config) {
  if (vocab_size < 2) throw Error(ErrorCode::kInvalidConfig, "vocab_size must be >= 2");
  if (config.candidates < 1 || config.candidates >= vocab_size) {
    throw Error(ErrorCode::kInvalidConfig, "candidate count must lie in [1, vocab_size)");
  }
  double exponent = config.zipf_exponent;
  if (config.shape == ChannelShape::kLongTailed && config.head_mass) {
    exponent = zipf_exponent_for_head_mass(config.candidates, *config.head_mass);
  }

  const auto V = static_cast<std::size_t>(vocab_size);
  const auto c = static_cast<std::size_t>(config.candidates);
  Rng rng(stream_seed(config.seed, "confusion", 0));
  std::vector<std::vector<Candidate>> entries(V);
  std::vector<Token> others;
  for (std::size_t x = 0; x < V; ++x) {
    others.clear();
    for (std::size_t t = 0; t < V; ++t) {
      if (t != x) others.push_back(static_cast<Token>(t));
    }
    // the draw order is the rank order
    for (std::size_t k = 0; k < c; ++k) {
      std::swap(others[k], others[k + rng.below(others.size() - k)]);
      entries[x].push_back({others[k], 1.0 / static_cast<double>(c)});
    }
  }
  return from_entries(vocab_size, std::move(entries), ChannelShape::kUniform)
      .reweighted(config.shape, exponent);
}

ConfusionTable ConfusionTable::from_entries(int vocab_size, std::vector<std::vector<Candidate>> entries,
                                            ChannelShape shape, double zipf_exponent) {
  ConfusionTable table;
  table.vocab_size_ = vocab_size;
  table.shape_ = shape;
  table.exponent_ = shape == ChannelShape::kUniform ? 0.0 : zipf_exponent;
  for (auto& e : entries) {
    std::stable_sort(e.begin(), e.end(),
                     [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });
  }
  table.entries_ = std::move(entries);
  table.validate();
  return table;
}

ConfusionTable ConfusionTable::reweighted(ChannelShape shape, double zipf_exponent) const {
  ConfusionTable table = *this;
  table.shape_ = shape;
  table.exponent_ = shape == ChannelShape::kUniform ? 0.0 : zipf_exponent;
  for (auto& e : table.entries_) {
    const int c = static_cast<int>(e.size());
    const auto w = shape == ChannelShape::kUniform ? std::vector<double>(e.size(), 1.0 / c)
                                                   : zipf_weights(c, zipf_exponent);
    for (std::size_t k = 0; k < e.size(); ++k) e[k].weight = w[k];
  }
  table.validate();
  return table;
}

void ConfusionTable::validate() const {
  if (vocab_size_ < 2) throw Error(ErrorCode::kInvalidConfig, "vocab_size must be >= 2");
  if (entries_.size() != static_cast<std::size_t>(vocab_size_)) {
    throw Error(ErrorCode::kInvalidConfig, "confusion table needs one entry per token");
  }
  for (std::size_t x = 0; x < entries_.size(); ++x) {
    const auto& e = entries_[x];
    if (e.empty()) throw Error(ErrorCode::kInvalidConfig, "confusion entry " + std::to_string(x) + " is empty");
    double total = 0.0;
    std::vector<bool> seen(entries_.size(), false);
    for (const auto& cand : e) {
      if (cand.token >= static_cast<Token>(vocab_size_) || cand.token == x || seen[cand.token]) {
        throw Error(ErrorCode::kInvalidConfig, "bad candidate in confusion entry " + std::to_string(x));
      }
      if (!(cand.weight > 0.0 && cand.weight <= 1.0)) {
        throw Error(ErrorCode::kInvalidConfig, "candidate weight outside (0, 1]");
      }
      seen[cand.token] = true;
      total += cand.weight;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw Error(ErrorCode::kInvalidConfig, "confusion entry " + std::to_string(x) + " does not sum to 1");
    }
    const auto law = shape_ == ChannelShape::kUniform
                         ? std::vector<double>(e.size(), 1.0 / static_cast<double>(e.size()))
                         : zipf_weights(static_cast<int>(e.size()), exponent_);
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (std::abs(e[k].weight - law[k]) > kProbabilityTolerance) {
        throw Error(ErrorCode::kInvalidConfig,
                    std::string("confusion entry does not follow the ") + to_string(shape_) + " law");
      }
    }
  }
}

std::span<const Candidate> ConfusionTable::candidates(Token source) const {
  if (source >= entries_.size()) throw Error(ErrorCode::kInvalidArgument, "token out of range");
  return entries_[source];
}

double ConfusionTable::weight(Token source, Token target) const {
  for (const auto& cand : candidates(source)) {
    if (cand.token == target) return cand.weight;
  }
  return 0.0;
}

Token ConfusionTable::sample(Token source, Rng& rng) const {
  const auto& e = entries_.at(source);
  std::vector<double> w(e.size());
  std::transform(e.begin(), e.end(), w.begin(), [](const Candidate& c) { return c.weight; });
  return e[rng.categorical(w)].token;
}

double ConfusionTable::head_mass() const {
  double total = 0.0;
  for (const auto& e : entries_) total += e.front().weight;
  return total / static_cast<double>(entries_.size());
}

std::string ConfusionTable::to_json() const {
  json doc;
  doc["vocab_size"] = vocab_size_;
  doc["shape"] = to_string(shape_);
  doc["zipf_exponent"] = exponent_;
  json entries = json::array();
  for (const auto& e : entries_) {
    json row = json::array();
    for (const auto& cand : e) row.push_back(json::array({cand.token, cand.weight}));
    entries.push_back(std::move(row));
  }
  doc["entries"] = std::move(entries);
  return doc.dump();
}

ConfusionTable ConfusionTable::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    std::vector<std::vector<Candidate>> entries;
    for (const auto& row : doc.at("entries")) {
      auto& e = entries.emplace_back();
      for (const auto& cand : row) e.push_back({cand.at(0).get<Token>(), cand.at(1).get<double>()});
    }
    return from_entries(doc.at("vocab_size").get<int>(), std::move(entries),
                        parse_channel_shape(doc.at("shape").get<std::string>()),
                        doc.at("zipf_exponent").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("confusion json: ") + e.what());
  }
}

double channel_prob(const ConfusionTable& table, double rate, Token source, Token observed) {
  if (source == observed) return 1.0 - rate;
  return rate * table.weight(source, observed);
}

CorruptionRecord corrupt(const Sentence& sentence, const ConfusionTable& table, double rate,
                         CorruptionMode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "rate must lie in [0, 1]");
  CorruptionRecord record;
  record.clean = sentence;
  record.corrupted = sentence;
  record.channel_rate = rate;
  auto replace = [&](std::size_t i) {
    const Token y = table.sample(sentence[i], rng);
    record.corrupted[i] = y;
    record.edits.push_back({i, sentence[i], y});
  };
  if (mode == CorruptionMode::kSingleEdit) {
    replace(rng.below(sentence.size()));
  } else {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (rng.uniform() < rate) replace(i);
    }
  }
  return record;
}

SampleCategory categorize_in_context(const WorldModel& world, const ConfusionTable& table,
                                     const Sentence& clean, std::size_t position, Token replacement,
                                     double rate) {
  const Token original = clean.at(position);
  if (replacement == original) throw Error(ErrorCode::kInvalidArgument, "replacement equals the original");
  const auto prior = world.conditional(clean, position);
  SampleCategory out{Category::kTrue, {}};
  for (std::size_t v = 0; v < prior.size(); ++v) {
    if (prior[v] > 0.0 && channel_prob(table, rate, static_cast<Token>(v), replacement) > 0.0) {
      out.candidate_set.push_back(static_cast<Token>(v));
    }
  }
  const auto has = [&](Token t) {
    return std::binary_search(out.candidate_set.begin(), out.candidate_set.end(), t);
  };
  if (!has(original)) {
    throw Error(ErrorCode::kUnsupportedRecord, "edit is unreachable under the world and channel");
  }
  if (out.candidate_set.size() == 1) {
    out.label = Category::kTrue;
  } else if (has(replacement)) {
    out.label = Category::kNoisy;
  } else {
    out.label = Category::kMultiAnswer;
  }
  return out;
}

SampleCategory categorize(const CorruptionRecord& record, const WorldModel& world,
                          const ConfusionTable& table, std::size_t edit_index) {
  if (record.edits.size() != 1 || edit_index != 0) {
    throw Error(ErrorCode::kUnsupportedRecord, "categories are defined for single-edit records only");
  }
  const Edit& edit = record.edits.front();
  return categorize_in_context(world, table, record.clean, edit.position, edit.replacement,
                               record.channel_rate);
}

PairCorpus generate_corpus_characters(const WorldModel& world, const ConfusionTable& table,
                                      const CorpusConfig& config, std::size_t target_characters) {
  if (config.length.min < 1 || config.length.max < config.length.min) {
    throw Error(ErrorCode::kInvalidConfig, "invalid length range");
  }
  if (!(config.corrupt_fraction >= 0.0 && config.corrupt_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "corrupt_fraction must lie in [0, 1]");
  }
  check_rate(config.rate);
  PairCorpus corpus;
  std::size_t characters = 0;
  for (std::size_t i = 0;; ++i) {
    if (target_characters == 0 ? i >= config.n_sentences : characters >= target_characters) break;
    Rng rng(stream_seed(config.seed, config.stream, i));
    const std::size_t length = config.length.min + rng.below(config.length.max - config.length.min + 1);
    const Sentence clean = world.sample(length, rng);
    const bool pass_through = config.corrupt_fraction >= 1.0 || rng.uniform() < config.corrupt_fraction;
    CorruptionRecord record;
    if (pass_through) {
      record = corrupt(clean, table, config.rate, config.mode, rng);
    } else {
      record = CorruptionRecord{clean, clean, {}, config.rate, {}};
    }
    if (config.annotate) {
      for (const Edit& e : record.edits) {
        record.categories.push_back(
            categorize_in_context(world, table, record.clean, e.position, e.replacement, config.rate).label);
      }
    }
    characters += record.clean.size();
    corpus.push_back(std::move(record));
  }
  return corpus;
}

PairCorpus generate_corpus(const WorldModel& world, const ConfusionTable& table,
                           const CorpusConfig& config) {
  if (config.n_sentences == 0) throw Error(ErrorCode::kEmptyCorpus, "n_sentences must be >= 1");
  return generate_corpus_characters(world, table, config, 0);
}

std::size_t total_characters(const PairCorpus& corpus) noexcept {
  std::size_t n = 0;
  for (const auto& r : corpus) n += r.clean.size();
  return n;
}

std::size_t total_edits(const PairCorpus& corpus) noexcept {
  std::size_t n = 0;
  for (const auto& r : corpus) n += r.edits.size();
  return n;
}

std::string record_to_json(const CorruptionRecord& record) {
  std::string out = "{\"clean\":";
  append_ids(out, record.clean);
  out += ",\"corrupted\":";
  append_ids(out, record.corrupted);
  out += ",\"edits\":[";
  for (std::size_t k = 0; k < record.edits.size(); ++k) {
    const Edit& e = record.edits[k];
    if (k) out.push_back(',');
    out += '[' + std::to_string(e.position) + ',' + std::to_string(e.original) + ',' +
           std::to_string(e.replacement) + ']';
  }
  out.push_back(']');
  if (!record.categories.empty()) {
    out += ",\"categories\":[";
    for (std::size_t k = 0; k < record.categories.size(); ++k) {
      if (k) out.push_back(',');
      out += std::to_string(static_cast<int>(record.categories[k]));
    }
    out.push_back(']');
  }
  out.push_back('}');
  return out;
}

std::string corpus_to_jsonl(const PairCorpus& corpus) {
  std::string out;
  for (const auto& record : corpus) {
    out += record_to_json(record);
    out.push_back('\n');
  }
  return out;
}

PairCorpus corpus_from_jsonl(std::string_view text) {
  PairCorpus corpus;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    const std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json doc = json::parse(line);
      CorruptionRecord record;
      record.clean = doc.at("clean").get<Sentence>();
      record.corrupted = doc.at("corrupted").get<Sentence>();
      for (const auto& e : doc.at("edits")) {
        record.edits.push_back({e.at(0).get<std::size_t>(), e.at(1).get<Token>(), e.at(2).get<Token>()});
      }
      if (doc.contains("categories")) {
        for (const auto& c : doc.at("categories")) {
          const int v = c.get<int>();
          if (v < 0 || v > 2) throw Error(ErrorCode::kParse, "category out of range");
          record.categories.push_back(static_cast<Category>(v));
        }
      }
      if (record.clean.size() != record.corrupted.size() ||
          (!record.categories.empty() && record.categories.size() != record.edits.size())) {
        throw Error(ErrorCode::kParse, "inconsistent record");
      }
      for (const Edit& e : record.edits) {
        if (e.position >= record.clean.size() || record.clean[e.position] != e.original ||
            record.corrupted[e.position] != e.replacement) {
          throw Error(ErrorCode::kParse, "edit does not match the sentences");
        }
      }
      std::size_t differing = 0;
      for (std::size_t i = 0; i < record.clean.size(); ++i) differing += record.clean[i] != record.corrupted[i];
      if (differing != record.edits.size()) throw Error(ErrorCode::kParse, "edits do not cover the differences");
      corpus.push_back(std::move(record));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, "corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace denoise
