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
#include <span>
#include <vector>

namespace hgdiff {

// Moments sum_i z_i^m for m = 1..degree. Entries of z must lie in [0, 1] and
// degree >= z.size(). Throws ValidationError otherwise.
std::vector<double> power_sum_encode(std::span<const double> z, std::size_t degree);

// Inverts the first `count` moments back to the multiset they came from:
// Newton's identities give the elementary symmetric polynomials, whose monic
// polynomial is solved through its companion matrix. Returned ascending.
// Throws Error when the recovered roots are not real or do not reproduce the
// moments.
std::vector<double> power_sum_decode(std::span<const double> moments, std::size_t count);

}  // namespace hgdiff
