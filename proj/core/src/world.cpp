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
#include "denoise/world.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace denoise {
namespace {

using nlohmann::json;

std::size_t checked_context_count(int vocab_size, int order) {
  std::size_t count = 1;
  for (int i = 0; i < order; ++i) {
    count *= static_cast<std::size_t>(vocab_size);
    if (count > kContextBudget) {
      throw Error(ErrorCode::kInvalidConfig,
                  "V^order exceeds the context budget of " + std::to_string(kContextBudget));
    }
  }
  return count;
}

void check_distribution(std::span<const double> probs, const std::string& what) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidConfig, what + " has an entry outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " sums to " << total;
    throw Error(ErrorCode::kInvalidConfig, msg.str());
  }
}

std::string context_key(std::size_t index, int vocab_size, int order) {
  std::vector<std::size_t> digits(static_cast<std::size_t>(order));
  for (int m = order - 1; m >= 0; --m) {
    digits[static_cast<std::size_t>(m)] = index % static_cast<std::size_t>(vocab_size);
    index /= static_cast<std::size_t>(vocab_size);
  }
  std::string key;
  for (std::size_t m = 0; m < digits.size(); ++m) {
    if (m) key.push_back(',');
    key += std::to_string(digits[m]);
  }
  return key;
}

}  // namespace

WorldModel WorldModel::build(const WorldConfig& config) {
  if (config.vocab_size < 2) throw Error(ErrorCode::kInvalidConfig, "vocab_size must be >= 2");
  if (config.order < 1) throw Error(ErrorCode::kInvalidConfig, "order must be >= 1");

  WorldModel world;
  world.vocab_size_ = config.vocab_size;
  world.order_ = config.order;
  world.seed_ = config.seed;
  world.context_count_ = checked_context_count(config.vocab_size, config.order);
  const auto V = static_cast<std::size_t>(config.vocab_size);

  if (config.initial.empty()) {
    world.initial_.assign(V, 1.0 / static_cast<double>(V));
  } else {
    if (config.initial.size() != V) throw Error(ErrorCode::kInvalidConfig, "initial has wrong length");
    world.initial_ = config.initial;
  }

  world.transitions_.assign(world.context_count_ * V, 0.0);
  if (!config.rows.empty()) {
    if (config.rows.size() != world.context_count_) {
      throw Error(ErrorCode::kInvalidConfig, "expected " + std::to_string(world.context_count_) + " rows");
    }
    for (std::size_t c = 0; c < world.context_count_; ++c) {
      if (config.rows[c].size() != V) throw Error(ErrorCode::kInvalidConfig, "row has wrong length");
      std::copy(config.rows[c].begin(), config.rows[c].end(), world.transitions_.begin() + c * V);
    }
  } else {
    if (config.support < 1 || static_cast<std::size_t>(config.support) > V) {
      throw Error(ErrorCode::kInvalidConfig, "support must lie in [1, vocab_size]");
    }
    if (!(config.weight_spread >= 1.0)) throw Error(ErrorCode::kInvalidConfig, "weight_spread must be >= 1");
    Rng rng(stream_seed(config.seed, "world", 0));
    std::vector<Token> tokens(V);
    for (std::size_t c = 0; c < world.context_count_; ++c) {
      std::iota(tokens.begin(), tokens.end(), Token{0});
      // partial Fisher-Yates: the first `support` slots become the successors
      std::vector<double> raw(V, 0.0);
      double total = 0.0;
      for (std::size_t k = 0; k < static_cast<std::size_t>(config.support); ++k) {
        std::swap(tokens[k], tokens[k + rng.below(V - k)]);
        const double w = 1.0 + (config.weight_spread - 1.0) * rng.uniform();
        raw[tokens[k]] = w;
        total += w;
      }
      for (std::size_t v = 0; v < V; ++v) world.transitions_[c * V + v] = raw[v] / total;
    }
  }
  world.validate();
  return world;
}

void WorldModel::validate() const {
  check_distribution(initial_, "initial distribution");
  for (std::size_t c = 0; c < context_count_; ++c) {
    check_distribution(row(c), "transition row " + std::to_string(c));
  }
}

std::span<const double> WorldModel::row(std::size_t context) const {
  if (context >= context_count_) throw Error(ErrorCode::kInvalidArgument, "context index out of range");
  const auto V = static_cast<std::size_t>(vocab_size_);
  return std::span<const double>(transitions_).subspan(context * V, V);
}

std::size_t WorldModel::context_index(std::span<const Token> context) const {
  if (context.size() != static_cast<std::size_t>(order_)) {
    throw Error(ErrorCode::kInvalidArgument, "context length must equal the order");
  }
  std::size_t index = 0;
  for (Token t : context) {
    if (t >= static_cast<Token>(vocab_size_)) throw Error(ErrorCode::kInvalidArgument, "token out of range");
    index = index * static_cast<std::size_t>(vocab_size_) + t;
  }
  return index;
}

std::size_t WorldModel::context_at(const Sentence& sentence, std::size_t position) const {
  std::size_t index = 0;
  for (int m = order_; m >= 1; --m) {
    const auto offset = static_cast<std::size_t>(m);
    const Token t = position >= offset ? sentence[position - offset] : Token{0};
    index = index * static_cast<std::size_t>(vocab_size_) + t;
  }
  return index;
}

double WorldModel::factor(const Sentence& sentence, std::size_t position) const {
  const Token t = sentence[position];
  if (position == 0) return initial_[t];
  return transitions_[context_at(sentence, position) * static_cast<std::size_t>(vocab_size_) + t];
}

double WorldModel::sentence_prob(const Sentence& sentence) const {
  if (!valid(sentence)) throw Error(ErrorCode::kInvalidArgument, "sentence has invalid tokens");
  constexpr std::size_t kLinearLimit = 64;
  if (sentence.size() <= kLinearLimit) {
    double prob = 1.0;
    for (std::size_t i = 0; i < sentence.size(); ++i) prob *= factor(sentence, i);
    return prob;
  }
  double log_prob = 0.0;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const double f = factor(sentence, i);
    if (f == 0.0) return 0.0;
    log_prob += std::log(f);
  }
  return std::exp(log_prob);
}

std::vector<double> WorldModel::conditional(const Sentence& sentence, std::size_t position) const {
  if (position >= sentence.size()) throw Error(ErrorCode::kInvalidArgument, "position out of range");
  if (!valid(sentence)) throw Error(ErrorCode::kInvalidArgument, "sentence has invalid tokens");

  // Only the factors at position..position+order see the token at position.
  const std::size_t last = std::min(sentence.size() - 1, position + static_cast<std::size_t>(order_));
  for (std::size_t j = 0; j < sentence.size(); ++j) {
    if ((j < position || j > last) && factor(sentence, j) == 0.0) {
      throw Error(ErrorCode::kImpossibleContext, "context outside the window has probability zero");
    }
  }

  Sentence probe = sentence;
  std::vector<double> weights(static_cast<std::size_t>(vocab_size_), 0.0);
  double total = 0.0;
  for (std::size_t v = 0; v < weights.size(); ++v) {
    probe[position] = static_cast<Token>(v);
    double w = 1.0;
    for (std::size_t j = position; j <= last && w != 0.0; ++j) w *= factor(probe, j);
    weights[v] = w;
    total += w;
  }
  if (total == 0.0) throw Error(ErrorCode::kImpossibleContext, "no token fits the context");
  for (double& w : weights) w /= total;
  return weights;
}

Sentence WorldModel::sample(std::size_t length, Rng& rng) const {
  if (length < 1) throw Error(ErrorCode::kInvalidArgument, "length must be >= 1");
  Sentence out;
  out.reserve(length);
  out.push_back(static_cast<Token>(rng.categorical(initial_)));
  while (out.size() < length) {
    out.push_back(Token{0});
    out.back() = static_cast<Token>(rng.categorical(row(context_at(out, out.size() - 1))));
  }
  return out;
}

bool WorldModel::valid(const Sentence& sentence) const noexcept {
  if (sentence.empty()) return false;
  for (Token t : sentence) {
    if (t >= static_cast<Token>(vocab_size_)) return false;
  }
  return true;
}

std::string WorldModel::to_json() const {
  json doc;
  doc["vocab_size"] = vocab_size_;
  doc["order"] = order_;
  doc["seed"] = seed_;
  doc["initial"] = initial_;
  json rows = json::object();
  for (std::size_t c = 0; c < context_count_; ++c) {
    auto r = row(c);
    rows[context_key(c, vocab_size_, order_)] = std::vector<double>(r.begin(), r.end());
  }
  doc["transitions"] = std::move(rows);
  return doc.dump();
}

WorldModel WorldModel::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("world json: ") + e.what());
  }
  try {
    WorldConfig config;
    config.vocab_size = doc.at("vocab_size").get<int>();
    config.order = doc.at("order").get<int>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    config.initial = doc.at("initial").get<std::vector<double>>();
    const std::size_t count = checked_context_count(config.vocab_size, config.order);
    config.rows.assign(count, {});
    std::vector<bool> seen(count, false);
    for (const auto& [key, value] : doc.at("transitions").items()) {
      std::size_t index = 0;
      int parts = 0;
      std::stringstream stream(key);
      std::string piece;
      while (std::getline(stream, piece, ',')) {
        const auto t = std::stoul(piece);
        if (t >= static_cast<std::size_t>(config.vocab_size)) throw Error(ErrorCode::kParse, "context token out of range");
        index = index * static_cast<std::size_t>(config.vocab_size) + t;
        ++parts;
      }
      if (parts != config.order || seen[index]) throw Error(ErrorCode::kParse, "bad transition key '" + key + "'");
      seen[index] = true;
      config.rows[index] = value.get<std::vector<double>>();
    }
    for (bool s : seen) {
      if (!s) throw Error(ErrorCode::kParse, "missing transition rows");
    }
    return build(config);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("world json: ") + e.what());
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kParse, "world json: malformed context key");
  }
}

}  // namespace denoise
