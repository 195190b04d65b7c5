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
#include "denoise/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "denoise/hashing.hpp"
#include "json.hpp"

namespace denoise {
namespace {

using nlohmann::json;

std::vector<std::uint64_t> zero_counts(int vocab_size) {
  return std::vector<std::uint64_t>(static_cast<std::size_t>(vocab_size) + 1, 0);
}

void add_counts(std::vector<std::uint64_t>& into, std::span<const std::uint64_t> from) {
  for (std::size_t k = 0; k < into.size(); ++k) into[k] += from[k];
}

}  // namespace

Window Window::parse(std::string_view text) {
  Window window{{}};
  std::stringstream stream{std::string(text)};
  std::string piece;
  try {
    while (std::getline(stream, piece, ',')) window.offsets.push_back(std::stoi(piece));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidConfig, "malformed window '" + std::string(text) + "'");
  }
  if (window.offsets.empty()) throw Error(ErrorCode::kInvalidConfig, "window needs at least one offset");
  return window;
}

bool Window::has_center() const noexcept {
  return std::find(offsets.begin(), offsets.end(), 0) != offsets.end();
}

std::string Window::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if (k) out.push_back(',');
    out += std::to_string(offsets[k]);
  }
  return out;
}

CorrectorModel::CorrectorModel(int vocab_size, Window window, double alpha)
    : vocab_size_(vocab_size), window_(std::move(window)), alpha_(alpha) {
  if (vocab_size_ < 2) throw Error(ErrorCode::kInvalidConfig, "vocab_size must be >= 2");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw Error(ErrorCode::kInvalidConfig, "alpha must be positive");
  if (window_.offsets.empty()) throw Error(ErrorCode::kInvalidConfig, "window needs at least one offset");
  // signatures are packed base V+1 (V encodes the boundary)
  const double key_bits = static_cast<double>(window_.offsets.size()) * std::log2(vocab_size_ + 1.0);
  if (key_bits > 63.0) throw Error(ErrorCode::kInvalidConfig, "window too wide for the vocabulary");
  center_counts_.assign(static_cast<std::size_t>(vocab_size_), zero_counts(vocab_size_));
  marginal_ = zero_counts(vocab_size_);
}

CorrectorModel CorrectorModel::train(const PairCorpus& corpus, int vocab_size, Window window,
                                     double alpha) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot train on an empty corpus");
  CorrectorModel model(vocab_size, std::move(window), alpha);
  for (const auto& record : corpus) model.observe(record);
  model.corpus_hash_ = denoise::corpus_hash(corpus);
  return model;
}

std::uint64_t CorrectorModel::signature(const Sentence& tokens, std::size_t position) const {
  const auto base = static_cast<std::uint64_t>(vocab_size_) + 1;
  std::uint64_t key = 0;
  for (int offset : window_.offsets) {
    const auto j = static_cast<std::ptrdiff_t>(position) + offset;
    const bool inside = j >= 0 && j < static_cast<std::ptrdiff_t>(tokens.size());
    key = key * base + (inside ? tokens[static_cast<std::size_t>(j)] : static_cast<std::uint64_t>(vocab_size_));
  }
  return key;
}

void CorrectorModel::observe(const CorruptionRecord& record) {
  if (record.clean.size() != record.corrupted.size()) {
    throw Error(ErrorCode::kInvalidArgument, "clean and corrupted lengths differ");
  }
  const auto V = static_cast<std::size_t>(vocab_size_);
  for (std::size_t i = 0; i < record.clean.size(); ++i) {
    const Token target = record.clean[i];
    const Token input = record.corrupted[i];
    if (target >= V || input >= V) throw Error(ErrorCode::kInvalidArgument, "token out of range");
    auto [it, inserted] = counts_.try_emplace(signature(record.corrupted, i));
    if (inserted) it->second = zero_counts(vocab_size_);
    ++it->second[target];
    ++it->second[V];
    ++center_counts_[input][target];
    ++center_counts_[input][V];
    ++marginal_[target];
    ++marginal_[V];
    ++observations_;
  }
}

void CorrectorModel::merge(const CorrectorModel& other) {
  if (other.vocab_size_ != vocab_size_ || !(other.window_ == window_)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot merge models with different vocabularies or windows");
  }
  for (const auto& [key, counts] : other.counts_) {
    auto [it, inserted] = counts_.try_emplace(key);
    if (inserted) it->second = zero_counts(vocab_size_);
    add_counts(it->second, counts);
  }
  for (std::size_t v = 0; v < center_counts_.size(); ++v) add_counts(center_counts_[v], other.center_counts_[v]);
  add_counts(marginal_, other.marginal_);
  observations_ += other.observations_;
  corpus_hash_ = sha256_hex(corpus_hash_ + "+" + other.corpus_hash_);
}

std::vector<double> CorrectorModel::smoothed(std::span<const std::uint64_t> counts) const {
  const auto V = static_cast<std::size_t>(vocab_size_);
  const double denominator = static_cast<double>(counts[V]) + alpha_ * static_cast<double>(V);
  std::vector<double> probs(V);
  for (std::size_t v = 0; v < V; ++v) probs[v] = (static_cast<double>(counts[v]) + alpha_) / denominator;
  return probs;
}

std::vector<double> CorrectorModel::predict(const Sentence& corrupted, std::size_t position) const {
  if (position >= corrupted.size()) throw Error(ErrorCode::kInvalidArgument, "position out of range");
  const auto V = static_cast<std::size_t>(vocab_size_);
  if (const auto it = counts_.find(signature(corrupted, position)); it != counts_.end()) {
    return smoothed(it->second);
  }
  if (window_.has_center()) {
    const Token center = corrupted[position];
    if (center < V && center_counts_[center][V] > 0) return smoothed(center_counts_[center]);
  } else if (marginal_[V] > 0) {
    return smoothed(marginal_);
  }
  return std::vector<double>(V, 1.0 / static_cast<double>(V));
}

Token decide(std::span<const double> probs, Token input) {
  Token best = input < probs.size() ? input : Token{0};
  for (std::size_t v = 0; v < probs.size(); ++v) {
    if (probs[v] > probs[best]) best = static_cast<Token>(v);
  }
  return best;
}

Sentence CorrectorModel::correct(const Sentence& corrupted) const {
  Sentence out(corrupted.size());
  for (std::size_t i = 0; i < corrupted.size(); ++i) out[i] = decide(predict(corrupted, i), corrupted[i]);
  return out;
}

double CorrectorModel::ce_loss(const PairCorpus& corpus) const {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& record : corpus) {
    for (std::size_t i = 0; i < record.clean.size(); ++i) {
      total -= std::log(predict(record.corrupted, i)[record.clean[i]]);
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::kEmptyCorpus, "cross-entropy of an empty corpus");
  return total / static_cast<double>(n);
}

CorrectorModel CorrectorModel::with_alpha(double alpha) const {
  CorrectorModel copy = *this;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kInvalidConfig, "alpha must be positive");
  copy.alpha_ = alpha;
  return copy;
}

bool CorrectorModel::same_counts(const CorrectorModel& other) const {
  return vocab_size_ == other.vocab_size_ && window_ == other.window_ && counts_ == other.counts_ &&
         center_counts_ == other.center_counts_ && marginal_ == other.marginal_ &&
         observations_ == other.observations_;
}

std::string CorrectorModel::to_json() const {
  const auto base = static_cast<std::uint64_t>(vocab_size_) + 1;
  std::vector<std::uint64_t> keys;
  keys.reserve(counts_.size());
  for (const auto& entry : counts_) keys.push_back(entry.first);
  std::sort(keys.begin(), keys.end());

  nlohmann::ordered_json doc;
  doc["header"] = {{"window", window_.to_string()},
                   {"alpha", alpha_},
                   {"vocab_size", vocab_size_},
                   {"corpus_hash", corpus_hash_}};
  doc["observations"] = observations_;
  auto signatures = nlohmann::ordered_json::array();
  for (std::uint64_t key : keys) {
    std::vector<long long> tokens(window_.offsets.size());
    std::uint64_t rest = key;
    for (std::size_t k = tokens.size(); k-- > 0;) {
      const auto t = rest % base;
      tokens[k] = t == static_cast<std::uint64_t>(vocab_size_) ? -1 : static_cast<long long>(t);
      rest /= base;
    }
    signatures.push_back({{"key", tokens}, {"counts", counts_.at(key)}});
  }
  doc["signatures"] = std::move(signatures);
  doc["center"] = center_counts_;
  doc["marginal"] = marginal_;
  return doc.dump();
}

CorrectorModel CorrectorModel::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const auto& header = doc.at("header");
    CorrectorModel model(header.at("vocab_size").get<int>(),
                         Window::parse(header.at("window").get<std::string>()),
                         header.at("alpha").get<double>());
    model.corpus_hash_ = header.at("corpus_hash").get<std::string>();
    model.observations_ = doc.at("observations").get<std::uint64_t>();
    const auto base = static_cast<std::uint64_t>(model.vocab_size_) + 1;
    const std::size_t width = model.vocab_size_ + std::size_t{1};
    for (const auto& entry : doc.at("signatures")) {
      const auto tokens = entry.at("key").get<std::vector<long long>>();
      auto counts = entry.at("counts").get<std::vector<std::uint64_t>>();
      if (tokens.size() != model.window_.offsets.size() || counts.size() != width) {
        throw Error(ErrorCode::kParse, "signature entry has the wrong shape");
      }
      std::uint64_t key = 0;
      for (long long t : tokens) {
        if (t < -1 || t >= model.vocab_size_) throw Error(ErrorCode::kParse, "signature token out of range");
        key = key * base + (t < 0 ? static_cast<std::uint64_t>(model.vocab_size_) : static_cast<std::uint64_t>(t));
      }
      model.counts_.emplace(key, std::move(counts));
    }
    model.center_counts_ = doc.at("center").get<std::vector<std::vector<std::uint64_t>>>();
    model.marginal_ = doc.at("marginal").get<std::vector<std::uint64_t>>();
    if (model.center_counts_.size() != static_cast<std::size_t>(model.vocab_size_) ||
        model.marginal_.size() != width ||
        std::any_of(model.center_counts_.begin(), model.center_counts_.end(),
                    [&](const auto& row) { return row.size() != width; })) {
      throw Error(ErrorCode::kParse, "count tables have the wrong shape");
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("model json: ") + e.what());
  }
}

std::string corpus_hash(const PairCorpus& corpus) { return sha256_hex(corpus_to_jsonl(corpus)); }

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kInvalidArgument, "distributions differ in size");
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) total += std::abs(p[k] - q[k]);
  return 0.5 * total;
}

}  // namespace denoise
