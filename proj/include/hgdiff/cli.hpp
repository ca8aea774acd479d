// Copyright 2026 The hgdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace hgdiff {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

struct CommandRequest {
  std::string command;  // generate, diffuse, train, check
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

/// Runs one command from a JSON config document and writes its artifacts,
/// manifest.json, and summary.json into the output directory. Progress goes
/// to `log`, errors to `err`. Returns one of the kExit* codes.
int run_command(const CommandRequest& request, std::ostream& log, std::ostream& err);

}  // namespace hgdiff
