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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hgdiff/error.hpp"
#include "hgdiff/power_sum.hpp"
#include "hgdiff/rng.hpp"
#include "test_util.hpp"

namespace hgdiff {
namespace {

using V = std::vector<double>;

TEST(PowerSum, EqualEntries) {
  const double c = 0.37;
  const V m = power_sum_encode(V{c, c}, 2);
  EXPECT_NEAR(m[0], 2 * c, 1e-15);
  EXPECT_NEAR(m[1], 2 * c * c, 1e-15);
}

TEST(PowerSum, FrozenPair) {
  const V m = power_sum_encode(V{0.2, 0.5}, 2);
  EXPECT_NEAR(m[0], 0.7, 1e-15);
  EXPECT_NEAR(m[1], 0.29, 1e-15);
  EXPECT_LE(testing::max_abs_diff(power_sum_decode(m, 2), V{0.2, 0.5}), 1e-12);
}

TEST(PowerSum, EncodingIgnoresOrder) {
  EXPECT_LE(testing::max_abs_diff(power_sum_encode(V{0.1, 0.9, 0.4}, 4), power_sum_encode(V{0.4, 0.1, 0.9}, 4)),
            1e-15);
}

TEST(PowerSum, RoundTripsRandomVectors) {
  Rng rng(8);
  for (std::size_t k = 1; k <= 5; ++k) {
    for (int trial = 0; trial < 100; ++trial) {
      V z(k);
      for (double& x : z) x = rng.uniform();
      std::sort(z.begin(), z.end());
      EXPECT_LE(testing::max_abs_diff(power_sum_decode(power_sum_encode(z, k), k), z), 1e-6) << "K=" << k;
    }
  }
}

TEST(PowerSum, RejectsBadInput) {
  EXPECT_THROW(power_sum_encode(V{1.5}, 1), ValidationError);
  EXPECT_THROW(power_sum_encode(V{0.1, 0.2, 0.3}, 2), ValidationError);
  // x^2 + 1 has no real roots: moments of a multiset {a, b} with a + b = 0, a^2 + b^2 = -2.
  EXPECT_THROW(power_sum_decode(V{0.0, -2.0}, 2), Error);
}

}  // namespace
}  // namespace hgdiff
