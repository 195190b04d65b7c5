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
#include "denoise/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "denoise/common.hpp"

namespace denoise {
namespace {

using nlohmann::ordered_json;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, message);
}

template <typename T>
void read(const ordered_json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void check_keys(const ordered_json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    require(allowed.count(key) > 0, "unknown key '" + key + "' in " + where);
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require(vocab_size >= 2, "vocab_size must be at least 2");
  require(order >= 1, "order must be at least 1");
  require(support >= 1 && support <= vocab_size, "support must lie in [1, vocab_size]");
  require(weight_spread >= 1.0, "weight_spread must be at least 1");
  require(candidates >= 1 && candidates < vocab_size, "candidates must lie in [1, vocab_size)");
  require(rate >= 0.0 && rate < 1.0, "rate must lie in [0, 1)");
  const double uniform_head = 1.0 / candidates;
  require(target_head_mass >= uniform_head && target_head_mass < 1.0, "target_head_mass must lie in [1/c, 1)");
  if (eval_shape == ChannelShape::kLongTailed) {
    require(eval_head_mass >= uniform_head && eval_head_mass < 1.0, "eval_head_mass must lie in [1/c, 1)");
  }
  require(length.min >= 1 && length.min <= length.max, "length range is invalid");
  require(filter_sentences > 0 && target_sentences > 0 && eval_sentences > 0, "corpus sizes must be positive");
  require(eval_error_fraction >= 0.0 && eval_error_fraction <= 1.0, "eval_error_fraction must lie in [0, 1]");
  require(window.has_center(), "window must contain offset 0");
  require(alpha > 0.0, "alpha must be positive");
  filter.validate();
  require(!thresholds.empty(), "thresholds must not be empty");
  for (double p : thresholds) require(p > 0.0 && p < 1.0, "thresholds must lie in (0, 1)");
  require(!volume_characters.empty(), "volume_characters must not be empty");
  for (std::size_t k = 0; k < volume_characters.size(); ++k) {
    require(volume_characters[k] > 0 && (k == 0 || volume_characters[k] > volume_characters[k - 1]),
            "volume_characters must be positive and ascending");
  }
  require(volume_threshold > 0.0 && volume_threshold < 1.0, "volume_threshold must lie in (0, 1)");
}

std::string ExperimentConfig::to_json() const {
  ordered_json j;
  j["seed"] = seed;
  j["vocab_size"] = vocab_size;
  j["order"] = order;
  j["support"] = support;
  j["weight_spread"] = weight_spread;
  j["candidates"] = candidates;
  j["rate"] = rate;
  j["target_head_mass"] = target_head_mass;
  j["eval_shape"] = denoise::to_string(eval_shape);
  j["eval_head_mass"] = eval_head_mass;
  j["length"] = {{"min", length.min}, {"max", length.max}};
  j["filter_sentences"] = filter_sentences;
  j["target_sentences"] = target_sentences;
  j["eval_sentences"] = eval_sentences;
  j["eval_error_fraction"] = eval_error_fraction;
  j["window"] = window.to_string();
  j["alpha"] = alpha;
  j["filter"] = {{"threshold", filter.threshold},
                 {"mode", denoise::to_string(filter.source)},
                 {"lambda_n", filter.lambda_n},
                 {"lambda_m", filter.lambda_m},
                 {"literal_noisy_rule", filter.literal_noisy_rule}};
  j["thresholds"] = thresholds;
  j["volume_characters"] = volume_characters;
  j["volume_threshold"] = volume_threshold;
  return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    check_keys(j,
               {"seed", "vocab_size", "order", "support", "weight_spread", "candidates", "rate",
                "target_head_mass", "eval_shape", "eval_head_mass", "length", "filter_sentences",
                "target_sentences", "eval_sentences", "eval_error_fraction", "window", "alpha", "filter",
                "thresholds", "volume_characters", "volume_threshold"},
               "config");
    read(j, "seed", c.seed);
    read(j, "vocab_size", c.vocab_size);
    read(j, "order", c.order);
    read(j, "support", c.support);
    read(j, "weight_spread", c.weight_spread);
    read(j, "candidates", c.candidates);
    read(j, "rate", c.rate);
    read(j, "target_head_mass", c.target_head_mass);
    if (j.contains("eval_shape")) c.eval_shape = parse_channel_shape(j["eval_shape"].get<std::string>());
    read(j, "eval_head_mass", c.eval_head_mass);
    if (j.contains("length")) {
      const auto& l = j["length"];
      check_keys(l, {"min", "max"}, "length");
      read(l, "min", c.length.min);
      read(l, "max", c.length.max);
    }
    read(j, "filter_sentences", c.filter_sentences);
    read(j, "target_sentences", c.target_sentences);
    read(j, "eval_sentences", c.eval_sentences);
    read(j, "eval_error_fraction", c.eval_error_fraction);
    if (j.contains("window")) c.window = Window::parse(j["window"].get<std::string>());
    read(j, "alpha", c.alpha);
    if (j.contains("filter")) {
      const auto& f = j["filter"];
      check_keys(f, {"threshold", "mode", "lambda_n", "lambda_m", "literal_noisy_rule"}, "filter");
      read(f, "threshold", c.filter.threshold);
      if (f.contains("mode")) c.filter.source = parse_filter_source(f["mode"].get<std::string>());
      read(f, "lambda_n", c.filter.lambda_n);
      read(f, "lambda_m", c.filter.lambda_m);
      read(f, "literal_noisy_rule", c.filter.literal_noisy_rule);
    }
    read(j, "thresholds", c.thresholds);
    read(j, "volume_characters", c.volume_characters);
    read(j, "volume_threshold", c.volume_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config has a wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace denoise
