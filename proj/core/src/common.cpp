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
#include "denoise/common.hpp"

namespace denoise {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "invalid config";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kImpossibleContext: return "impossible context";
    case ErrorCode::kUnsupportedRecord: return "unsupported record";
    case ErrorCode::kZeroDenominator: return "zero denominator";
    case ErrorCode::kBudgetExceeded: return "budget exceeded";
    case ErrorCode::kEmptyCorpus: return "empty corpus";
    case ErrorCode::kMisaligned: return "misaligned corpora";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kParse: return "parse error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace denoise
