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
#include <string>
#include <string_view>
#include <vector>

#include "denoise/augment.hpp"
#include "denoise/corrector.hpp"
#include "denoise/pipeline.hpp"
#include "denoise/world.hpp"

namespace denoise {

/// Every knob of an experiment. Component seeds are derived from `seed`, so a
/// config plus a seed fully determines every corpus and model.
struct ExperimentConfig {
  std::uint64_t seed = 1;

  // World: V = 20 order-1 chain with 5 successors per token.
  int vocab_size = 20;
  int order = 1;
  int support = 5;
  double weight_spread = 2.0;

  // Channels share one set of ranked confusion sets.
  int candidates = 7;
  double rate = 0.1;
  double target_head_mass = 0.587;  // long-tailed channel of D_o
  ChannelShape eval_shape = ChannelShape::kLongTailed;
  double eval_head_mass = 0.65;

  LengthRange length;
  std::size_t filter_sentences = 50000;  // D_r
  std::size_t target_sentences = 50000;  // D_o
  std::size_t eval_sentences = 20000;
  double eval_error_fraction = 0.5;

  Window window;
  double alpha = kDefaultAlpha;
  FilterConfig filter;

  std::vector<double> thresholds{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<std::size_t> volume_characters{1000, 10000, 100000};
  double volume_threshold = 1e-2;

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(std::string_view text);
};

}  // namespace denoise
