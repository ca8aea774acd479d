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

#include "hgdiff/power_sum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "hgdiff/error.hpp"

namespace hgdiff {

std::vector<double> power_sum_encode(std::span<const double> z, std::size_t degree) {
  if (degree < z.size())
    throw ValidationError("power_sum_encode: degree " + std::to_string(degree) +
                          " is smaller than the set size " + std::to_string(z.size()));
  for (double v : z)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("power_sum_encode: entries must lie in [0, 1]");
  std::vector<double> moments(degree, 0.0);
  for (double v : z) {
    double pw = 1.0;
    for (std::size_t m = 0; m < degree; ++m) {
      pw *= v;
      moments[m] += pw;
    }
  }
  return moments;
}

std::vector<double> power_sum_decode(std::span<const double> moments, std::size_t count) {
  if (moments.size() < count)
    throw ValidationError("power_sum_decode: need at least `count` moments");
  if (count == 0) return {};

  // k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
  std::vector<double> e(count + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= count; ++k) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      const double sign = (i % 2 == 1) ? 1.0 : -1.0;
      acc += sign * e[k - i] * moments[i - 1];
    }
    e[k] = acc / static_cast<double>(k);
  }

  // x^K + c_{K-1} x^{K-1} + ... + c_0 with c_{K-j} = (-1)^j e_j.
  const auto K = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index i = 1; i < K; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index j = 1; j <= K; ++j) {
    const double c = ((j % 2 == 0) ? 1.0 : -1.0) * e[static_cast<std::size_t>(j)];
    companion(K - j, K - 1) = -c;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw Error("power_sum_decode: eigenvalue solver failed");

  std::vector<double> roots(count);
  const auto values = solver.eigenvalues();
  for (std::size_t i = 0; i < count; ++i) {
    const auto v = values(static_cast<Eigen::Index>(i));
    if (std::abs(v.imag()) > 1e-6)
      throw Error("power_sum_decode: complex root " + std::to_string(v.real()) + " + " +
                  std::to_string(v.imag()) + "i; moments do not come from a real multiset");
    roots[i] = v.real();
  }

  // Newton polish on the monic polynomial; each root independently.
  auto poly = [&](double x, double& deriv) {
    double p = 1.0, dp = 0.0;
    for (std::size_t j = 1; j <= count; ++j) {
      dp = dp * x + p;
      p = p * x + ((j % 2 == 0) ? 1.0 : -1.0) * e[j];
    }
    deriv = dp;
    return p;
  };
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {
      double d = 0.0;
      const double p = poly(r, d);
      if (d == 0.0 || !std::isfinite(p / d)) break;
      const double next = r - p / d;
      double dn = 0.0;
      if (std::abs(poly(next, dn)) >= std::abs(p)) break;
      r = next;
    }
  }
  std::sort(roots.begin(), roots.end());

  double residual = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    double s = 0.0;
    for (double r : roots) s += std::pow(r, static_cast<double>(m + 1));
    residual = std::max(residual, std::abs(s - moments[m]) / std::max(1.0, std::abs(moments[m])));
  }
  if (residual > 1e-8)
    throw Error("power_sum_decode: recovered roots reproduce the moments only to " +
                std::to_string(residual));
  return roots;
}

}  // namespace hgdiff
