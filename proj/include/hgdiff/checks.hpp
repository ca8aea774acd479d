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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hgdiff {

struct CheckOptions {
  std::uint64_t seed = 0;
  // Self-test: flips the sign of the TV gradient entry at the argmin, which
  // the gradient suite must detect.
  bool inject_tv_sign_fault = false;
  // Suite names to run; empty runs all of them.
  std::vector<std::string> suites;
};

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::string note;
};

std::vector<std::string> check_suite_names();

// Throws ValidationError on an unknown suite name.
std::vector<SuiteResult> run_checks(const CheckOptions& options);

// {"passed": bool, "seed": ..., "suites": [{"name", "trials", "max_residual", "tolerance", "passed", "note"}]}
std::string check_report_json(const std::vector<SuiteResult>& results, const CheckOptions& options);

}  // namespace hgdiff
