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

#include <ostream>

namespace denoise::cli {

/// Entry point of the `denoise` tool. Returns the process exit code:
/// 0 on success, 1 on runtime failures, 2 on usage or config errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace denoise::cli
