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
#include <random>
#include <span>
#include <string_view>

namespace denoise {

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for an independent substream. Streams are addressed by a name
/// ("world", "corpus/d_r", ...) and an index so that sentence i of a corpus
/// is generated identically no matter how the work is scheduled.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // 53-bit uniform in [0, 1). Hand-rolled so draws are identical across
  // standard library implementations.
  double uniform();

  // Unbiased integer in [0, n).
  std::size_t below(std::size_t n);

  // Index drawn proportionally to weights; zero-weight entries are never chosen.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace denoise
