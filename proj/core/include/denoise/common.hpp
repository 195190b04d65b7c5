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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace denoise {

using Token = std::uint32_t;
using Sentence = std::vector<Token>;

enum class ErrorCode {
  kInvalidConfig,
  kInvalidArgument,
  kImpossibleContext,
  kUnsupportedRecord,
  kZeroDenominator,
  kBudgetExceeded,
  kEmptyCorpus,
  kMisaligned,
  kIo,
  kParse,
};

const char* to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported through this type;
/// callers branch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace denoise
