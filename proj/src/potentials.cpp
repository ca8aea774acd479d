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

#include "hgdiff/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "hgdiff/error.hpp"

namespace hgdiff {

// ---------------------------------------------------------------------------
// Node potentials
// ---------------------------------------------------------------------------

double node_potential_value(const NodePotentialSpec& spec, double h, double x) {
  switch (spec.kind) {
    case NodePotentialKind::kQuadratic:
      return (h - x) * (h - x);
    case NodePotentialKind::kLinear:
      return -x * h;
  }
  return 0.0;
}

double node_potential_grad(const NodePotentialSpec& spec, double h, double x) {
  switch (spec.kind) {
    case NodePotentialKind::kQuadratic:
      return 2.0 * (h - x);
    case NodePotentialKind::kLinear:
      return -x;
  }
  return 0.0;
}

double node_potential_prox(const NodePotentialSpec& spec, double z, double x, double scale) {
  switch (spec.kind) {
    case NodePotentialKind::kQuadratic:
      return (z + 2.0 * scale * x) / (1.0 + 2.0 * scale);
    case NodePotentialKind::kLinear:
      return z + scale * x;
  }
  return z;
}

// ---------------------------------------------------------------------------
// Spec helpers
// ---------------------------------------------------------------------------

std::string to_string(EdgePotentialKind kind) {
  switch (kind) {
    case EdgePotentialKind::kCliqueExpansion: return "ce";
    case EdgePotentialKind::kCliqueExpansionNormalized: return "ce_norm";
    case EdgePotentialKind::kDivergenceToMean: return "div_mean";
    case EdgePotentialKind::kTotalVariation: return "tv";
    case EdgePotentialKind::kLovaszCardinality: return "lec";
  }
  return "?";
}

void EdgePotentialSpec::validate() const {
  switch (kind) {
    case EdgePotentialKind::kCliqueExpansion:
    case EdgePotentialKind::kCliqueExpansionNormalized:
      break;
    case EdgePotentialKind::kDivergenceToMean:
      if (!(p >= 1.0) || !std::isfinite(p))
        throw ValidationError("div_mean requires a finite p >= 1");
      break;
    case EdgePotentialKind::kTotalVariation:
    case EdgePotentialKind::kLovaszCardinality:
      if (p != 1.0 && p != 2.0)
        throw ValidationError(to_string(kind) + " requires p in {1, 2}");
      break;
  }
  if (y) {
    if (kind != EdgePotentialKind::kLovaszCardinality)
      throw ValidationError("an explicit y is only meaningful for lec");
    for (double v : *y)
      if (!std::isfinite(v)) throw ValidationError("lec y has a non-finite entry");
  }
}

std::vector<double> lec_y_vector(std::size_t n) {
  std::vector<double> y(n, 0.0);
  if (n <= 1) return y;
  if (n % 2 == 0) {
    const double w = 2.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i < n / 2 ? w : -w;
  } else {
    const std::size_t half = (n - 1) / 2;
    const double w = 2.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) y[i] = i < half ? w : (i == half ? 0.0 : -w);
  }
  return y;
}

std::vector<double> EdgePotentialSpec::weights_for(std::size_t n) const {
  if (kind == EdgePotentialKind::kTotalVariation) {
    std::vector<double> w(n, 0.0);
    if (n >= 2) {
      w.front() = 1.0;
      w.back() = -1.0;
    }
    return w;
  }
  if (kind == EdgePotentialKind::kLovaszCardinality) {
    if (!y) return lec_y_vector(n);
    if (y->size() != n)
      throw ValidationError("lec y has " + std::to_string(y->size()) +
                            " entries but the hyperedge has " + std::to_string(n));
    return *y;
  }
  throw ValidationError("weights_for: only tv and lec carry weights");
}

namespace {

void require_degrees(std::span<const double> h, std::span<const double> degrees) {
  if (degrees.size() != h.size())
    throw ValidationError("ce_norm needs one degree per hyperedge member");
  for (double d : degrees)
    if (!(d > 0.0)) throw ValidationError("ce_norm needs positive degrees");
}

double mean_of(std::span<const double> h) {
  double s = 0.0;
  for (double v : h) s += v;
  return s / static_cast<double>(h.size());
}

// Stable descending order of h: ties keep ascending original index.
std::vector<std::size_t> descending_order(std::span<const double> h) {
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return h[a] > h[b]; });
  return order;
}

// <w, sort_desc(h)>
double sorted_inner(std::span<const double> h, std::span<const double> w) {
  const auto order = descending_order(h);
  double s = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) s += w[i] * h[order[i]];
  return s;
}

double lp_norm(std::span<const double> h, double p) {
  double m = 0.0;
  for (double v : h) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : h) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s, 1.0 / p);
}

bool non_increasing(std::span<const double> w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] > w[i - 1]) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Values and gradients
// ---------------------------------------------------------------------------

double edge_potential_value(const EdgePotentialSpec& spec, std::span<const double> h,
                            std::span<const double> degrees) {
  if (h.empty()) throw ValidationError("edge potential of an empty hyperedge");
  const double n = static_cast<double>(h.size());
  switch (spec.kind) {
    case EdgePotentialKind::kCliqueExpansion: {
      // sum_{u,v} (h_v - h_u)^2 = 2 n sum_v (h_v - mean)^2
      const double mu = mean_of(h);
      double ss = 0.0;
      for (double v : h) ss += (v - mu) * (v - mu);
      return 2.0 * n * ss;
    }
    case EdgePotentialKind::kCliqueExpansionNormalized: {
      require_degrees(h, degrees);
      std::vector<double> z(h.size());
      for (std::size_t i = 0; i < h.size(); ++i) z[i] = h[i] / std::sqrt(degrees[i]);
      const double mu = mean_of(z);
      double ss = 0.0;
      for (double v : z) ss += (v - mu) * (v - mu);
      return 2.0 * n * ss;
    }
    case EdgePotentialKind::kDivergenceToMean: {
      const double c = lp_norm(h, spec.p) / n;
      double s = 0.0;
      for (double v : h) s += (v - c) * (v - c);
      return s;
    }
    case EdgePotentialKind::kTotalVariation: {
      const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
      const double range = *hi - *lo;
      return spec.p == 1.0 ? range : range * range;
    }
    case EdgePotentialKind::kLovaszCardinality: {
      const auto w = spec.weights_for(h.size());
      const double s = sorted_inner(h, w);
      return spec.p == 1.0 ? s : s * s;
    }
  }
  return 0.0;
}

void edge_potential_grad(const EdgePotentialSpec& spec, std::span<const double> h,
                         std::span<const double> degrees, std::span<double> out) {
  if (h.empty()) throw ValidationError("edge potential of an empty hyperedge");
  if (out.size() != h.size()) throw ValidationError("gradient output size mismatch");
  const std::size_t k = h.size();
  const double n = static_cast<double>(k);
  switch (spec.kind) {
    case EdgePotentialKind::kCliqueExpansion: {
      const double mu = mean_of(h);
      for (std::size_t i = 0; i < k; ++i) out[i] = 4.0 * n * (h[i] - mu);
      return;
    }
    case EdgePotentialKind::kCliqueExpansionNormalized: {
      require_degrees(h, degrees);
      std::vector<double> z(k);
      for (std::size_t i = 0; i < k; ++i) z[i] = h[i] / std::sqrt(degrees[i]);
      const double mu = mean_of(z);
      for (std::size_t i = 0; i < k; ++i) out[i] = 4.0 * n * (z[i] - mu) / std::sqrt(degrees[i]);
      return;
    }
    case EdgePotentialKind::kDivergenceToMean: {
      const double p = spec.p;
      const double norm = lp_norm(h, p);
      const double c = norm / n;
      double r_sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        out[i] = 2.0 * (h[i] - c);
        r_sum += out[i];
      }
      if (norm == 0.0) return;
      for (std::size_t i = 0; i < k; ++i) {
        const double a = std::abs(h[i]);
        const double sgn = h[i] > 0.0 ? 1.0 : (h[i] < 0.0 ? -1.0 : 0.0);
        // d||h||_p / dh_i = sign(h_i) (|h_i| / ||h||_p)^{p-1}
        const double dnorm = p == 1.0 ? sgn : sgn * std::pow(a / norm, p - 1.0);
        out[i] -= r_sum * dnorm / n;
      }
      return;
    }
    case EdgePotentialKind::kTotalVariation: {
      std::fill(out.begin(), out.end(), 0.0);
      std::size_t imax = 0, imin = 0;
      for (std::size_t i = 1; i < k; ++i) {
        if (h[i] > h[imax]) imax = i;
        if (h[i] < h[imin]) imin = i;
      }
      const double range = h[imax] - h[imin];
      const double scale = spec.p == 1.0 ? 1.0 : 2.0 * range;
      out[imax] += scale;
      out[imin] -= scale;
      return;
    }
    case EdgePotentialKind::kLovaszCardinality: {
      const auto w = spec.weights_for(k);
      const auto order = descending_order(h);
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += w[i] * h[order[i]];
      const double scale = spec.p == 1.0 ? 1.0 : 2.0 * s;
      for (std::size_t i = 0; i < k; ++i) out[order[i]] = scale * w[i];
      return;
    }
  }
}

std::vector<double> edge_potential_grad(const EdgePotentialSpec& spec, std::span<const double> h,
                                        std::span<const double> degrees) {
  std::vector<double> out(h.size());
  edge_potential_grad(spec, h, degrees, out);
  return out;
}

// ---------------------------------------------------------------------------
// Proximal operators
// ---------------------------------------------------------------------------

namespace {

// prox of tau * <w, sort_desc(.)> for non-increasing w. Writes the isotonic
// (non-increasing) regression of sort_desc(h) - tau * w back to h's positions.
void prox_sorted_support(std::span<const double> h, std::span<const double> w, double tau,
                         std::span<double> out) {
  const std::size_t k = h.size();
  const auto order = descending_order(h);
  // Pool-adjacent-violators for a non-increasing fit.
  std::vector<double> block_sum;
  std::vector<std::size_t> block_len;
  block_sum.reserve(k);
  block_len.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    block_sum.push_back(h[order[i]] - tau * w[i]);
    block_len.push_back(1);
    while (block_sum.size() >= 2) {
      const std::size_t b = block_sum.size() - 1;
      const double last = block_sum[b] / static_cast<double>(block_len[b]);
      const double prev = block_sum[b - 1] / static_cast<double>(block_len[b - 1]);
      if (prev >= last) break;
      block_sum[b - 1] += block_sum[b];
      block_len[b - 1] += block_len[b];
      block_sum.pop_back();
      block_len.pop_back();
    }
  }
  std::size_t i = 0;
  for (std::size_t b = 0; b < block_sum.size(); ++b) {
    const double v = block_sum[b] / static_cast<double>(block_len[b]);
    for (std::size_t j = 0; j < block_len[b]; ++j, ++i) out[order[i]] = v;
  }
}

// prox of eta * <w, sort_desc(.)>^2 for non-increasing, zero-sum w. The
// minimizer is prox_{tau s}(h) with tau = 2 eta s(minimizer); the map
// tau -> tau - 2 eta s(prox_{tau s}(h)) is increasing, so bisect it.
void prox_sorted_support_squared(std::span<const double> h, std::span<const double> w, double eta,
                                 std::span<double> out) {
  const double s0 = sorted_inner(h, w);
  if (s0 <= 0.0) {
    std::copy(h.begin(), h.end(), out.begin());
    return;
  }
  std::vector<double> z(h.size());
  double lo = 0.0, hi = 2.0 * eta * s0;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    prox_sorted_support(h, w, mid, z);
    if (mid - 2.0 * eta * sorted_inner(z, w) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  prox_sorted_support(h, w, 0.5 * (lo + hi), out);
}

}  // namespace

void edge_potential_prox(const EdgePotentialSpec& spec, std::span<const double> h, double eta,
                         std::span<const double> degrees, std::span<double> out) {
  if (h.empty()) throw ValidationError("edge potential of an empty hyperedge");
  if (out.size() != h.size()) throw ValidationError("prox output size mismatch");
  if (!(eta >= 0.0)) throw ValidationError("prox step eta must be >= 0");
  const std::size_t k = h.size();
  if (eta == 0.0) {
    std::copy(h.begin(), h.end(), out.begin());
    return;
  }
  const double n = static_cast<double>(k);
  switch (spec.kind) {
    case EdgePotentialKind::kCliqueExpansion: {
      double s = 0.0;
      for (double v : h) s += v;
      const double denom = 1.0 + 4.0 * eta * n;
      for (std::size_t i = 0; i < k; ++i) out[i] = (h[i] + 4.0 * eta * s) / denom;
      return;
    }
    case EdgePotentialKind::kCliqueExpansionNormalized: {
      // (I + 4 eta n D^-1 - 4 eta a a^T) z = h with a = D^{-1/2} 1.
      require_degrees(h, degrees);
      double ab_h = 0.0, ab_a = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double b = 1.0 + 4.0 * eta * n / degrees[i];
        const double a = 1.0 / std::sqrt(degrees[i]);
        ab_h += a * h[i] / b;
        ab_a += a * a / b;
      }
      const double t = ab_h / (1.0 - 4.0 * eta * ab_a);
      for (std::size_t i = 0; i < k; ++i) {
        const double b = 1.0 + 4.0 * eta * n / degrees[i];
        out[i] = (h[i] + 4.0 * eta * t / std::sqrt(degrees[i])) / b;
      }
      return;
    }
    case EdgePotentialKind::kTotalVariation:
    case EdgePotentialKind::kLovaszCardinality: {
      const auto w = spec.weights_for(k);
      if (non_increasing(w)) {
        if (spec.p == 1.0) {
          prox_sorted_support(h, w, eta, out);
          return;
        }
        double wsum = 0.0, wabs = 0.0;
        for (double v : w) {
          wsum += v;
          wabs += std::abs(v);
        }
        if (std::abs(wsum) <= 1e-12 * std::max(1.0, wabs)) {
          prox_sorted_support_squared(h, w, eta, out);
          return;
        }
      }
      break;
    }
    case EdgePotentialKind::kDivergenceToMean:
      break;
  }
  const auto r = numeric_edge_prox(spec, h, eta, degrees);
  std::copy(r.z.begin(), r.z.end(), out.begin());
}

std::vector<double> edge_potential_prox(const EdgePotentialSpec& spec, std::span<const double> h,
                                        double eta, std::span<const double> degrees) {
  std::vector<double> out(h.size());
  edge_potential_prox(spec, h, eta, degrees, out);
  return out;
}

namespace {

// Newton iterations on the stationarity condition G(z) = 0 with a central
// finite-difference Jacobian. Used once the objective value is too flat to
// drive a line search. Returns true if max |G| reaches tol.
template <class GradFn>
bool newton_refine(const GradFn& gradient, std::vector<double>& z, std::vector<double>& g, double tol,
                   double scale) {
  const std::size_t k = z.size();
  const auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  gradient(z, g);
  double residual = max_abs(g);
  if (!std::isfinite(residual)) return false;
  const double h = 1e-6 * scale;
  std::vector<double> zp(k), gp(k), gm(k), next(k), g_next(k);
  for (int iter = 0; iter < 20 && residual > tol; ++iter) {
    Eigen::MatrixXd J(k, k);
    for (std::size_t j = 0; j < k; ++j) {
      zp = z;
      zp[j] = z[j] + h;
      gradient(zp, gp);
      zp[j] = z[j] - h;
      gradient(zp, gm);
      for (std::size_t i = 0; i < k; ++i) J(i, j) = (gp[i] - gm[i]) / (2.0 * h);
    }
    const Eigen::MatrixXd Js = 0.5 * (J + J.transpose());
    Eigen::VectorXd rhs(k);
    for (std::size_t i = 0; i < k; ++i) rhs(i) = -g[i];
    const Eigen::VectorXd d = Js.fullPivLu().solve(rhs);
    if (!d.allFinite()) return false;
    for (std::size_t i = 0; i < k; ++i) next[i] = z[i] + d(i);
    gradient(next, g_next);
    const double r = max_abs(g_next);
    if (!(r < residual)) return false;
    z.swap(next);
    g.swap(g_next);
    residual = r;
  }
  return residual <= tol;
}

// Minimizes the objective over vectors that are constant on each cluster of
// the given partition. Damped Newton on the reduced variables with a
// finite-difference Hessian.
template <class ObjFn, class GradFn>
std::vector<double> solve_on_partition(const ObjFn& objective, const GradFn& gradient,
                                       const std::vector<std::size_t>& cluster, std::size_t m,
                                       std::vector<double> z, double scale) {
  const std::size_t k = z.size();
  std::vector<double> c(m, 0.0), count(m, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    c[cluster[i]] += z[i];
    count[cluster[i]] += 1.0;
  }
  for (std::size_t j = 0; j < m; ++j) c[j] /= count[j];
  std::vector<double> full(k), g(k);
  auto expand = [&](const std::vector<double>& cv) {
    for (std::size_t i = 0; i < k; ++i) full[i] = cv[cluster[i]];
    return full;
  };
  auto reduced_grad = [&](const std::vector<double>& cv) {
    gradient(expand(cv), g);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < k; ++i) r(static_cast<Eigen::Index>(cluster[i])) += g[i];
    return r;
  };
  const double fd = 1e-7 * scale;
  double f = objective(expand(c));
  std::vector<double> cp(m), trial(m);
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::VectorXd G = reduced_grad(c);
    if (G.cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    Eigen::MatrixXd H(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      cp = c;
      cp[j] += fd;
      const Eigen::VectorXd gp = reduced_grad(cp);
      cp[j] -= 2.0 * fd;
      const Eigen::VectorXd gm = reduced_grad(cp);
      H.col(static_cast<Eigen::Index>(j)) = (gp - gm) / (2.0 * fd);
    }
    Eigen::VectorXd d = (0.5 * (H + H.transpose())).ldlt().solve(-G);
    if (!d.allFinite() || G.dot(d) >= 0.0) d = -G;
    const double slope = G.dot(d);
    double t = 1.0;
    bool moved = false;
    while (t >= 1e-12) {
      for (std::size_t j = 0; j < m; ++j) trial[j] = c[j] + t * d(static_cast<Eigen::Index>(j));
      const double ft = objective(expand(trial));
      if (ft <= f + 1e-4 * t * slope) {
        moved = ft < f;
        c = trial;
        f = ft;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return expand(c);
}

// Tries every partition obtained by merging sorted neighbours of z whose gap
// is at most a threshold, one threshold per gap, and returns the best point.
template <class ObjFn, class GradFn>
std::vector<double> cluster_polish(const ObjFn& objective, const GradFn& gradient, const std::vector<double>& z,
                                   double scale) {
  const std::size_t k = z.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
  std::vector<double> gaps;
  for (std::size_t i = 1; i < k; ++i) gaps.push_back(z[order[i]] - z[order[i - 1]]);
  std::vector<double> thresholds = gaps;
  thresholds.push_back(-1.0);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<double> best = z;
  double f_best = objective(z);
  std::vector<std::size_t> cluster(k);
  for (double thr : thresholds) {
    std::size_t m = 0;
    cluster[order[0]] = 0;
    for (std::size_t i = 1; i < k; ++i) {
      if (gaps[i - 1] > thr) ++m;
      cluster[order[i]] = m;
    }
    const auto cand = solve_on_partition(objective, gradient, cluster, m + 1, z, scale);
    const double fc = objective(cand);
    if (fc < f_best) {
      f_best = fc;
      best = cand;
    }
  }
  return best;
}

}  // namespace

NumericProxResult numeric_edge_prox(const EdgePotentialSpec& spec, std::span<const double> h,
                                    double eta, std::span<const double> degrees,
                                    const NumericProxOptions& options) {
  if (!(eta >= 0.0)) throw ValidationError("prox step eta must be >= 0");
  const std::size_t k = h.size();
  NumericProxResult result;
  result.z.assign(h.begin(), h.end());
  if (eta == 0.0) return result;

  auto objective = [&](std::span<const double> z) {
    double q = 0.0;
    for (std::size_t i = 0; i < k; ++i) q += (z[i] - h[i]) * (z[i] - h[i]);
    return eta * edge_potential_value(spec, z, degrees) + 0.5 * q;
  };
  auto gradient = [&](std::span<const double> z, std::span<double> g) {
    edge_potential_grad(spec, z, degrees, g);
    for (std::size_t i = 0; i < k; ++i) g[i] = eta * g[i] + z[i] - h[i];
  };

  double scale = 1.0;
  for (double v : h) scale = std::max(scale, std::abs(v));
  const double tol = options.grad_tol * scale;

  std::vector<double>& z = result.z;
  std::vector<double> g(k), trial(k), dir(k), g_next(k);
  // L-BFGS memory: s = z_{t+1} - z_t, y = g_{t+1} - g_t.
  constexpr std::size_t kMemory = 8;
  std::vector<std::vector<double>> mem_s, mem_y;
  std::vector<double> mem_rho, alpha(kMemory);
  double f = objective(z);
  double residual = std::numeric_limits<double>::infinity();
  bool stalled = false;
  double last_step = 1.0;
  std::size_t flat_steps = 0;
  std::size_t it = 0;
  gradient(z, g);
  for (; it < options.max_iters; ++it) {
    residual = 0.0;
    for (double v : g) residual = std::max(residual, std::abs(v));
    if (residual <= tol) {
      result.iterations = it;
      return result;
    }
    // Two-loop recursion for the search direction.
    dir = g;
    for (std::size_t m = mem_s.size(); m-- > 0;) {
      alpha[m] = mem_rho[m] * std::inner_product(mem_s[m].begin(), mem_s[m].end(), dir.begin(), 0.0);
      for (std::size_t i = 0; i < k; ++i) dir[i] -= alpha[m] * mem_y[m][i];
    }
    if (!mem_s.empty()) {
      const auto& sl = mem_s.back();
      const auto& yl = mem_y.back();
      const double gamma = std::inner_product(sl.begin(), sl.end(), yl.begin(), 0.0) /
                           std::inner_product(yl.begin(), yl.end(), yl.begin(), 0.0);
      for (double& v : dir) v *= gamma;
    }
    for (std::size_t m = 0; m < mem_s.size(); ++m) {
      const double beta = mem_rho[m] * std::inner_product(mem_y[m].begin(), mem_y[m].end(), dir.begin(), 0.0);
      for (std::size_t i = 0; i < k; ++i) dir[i] += (alpha[m] - beta) * mem_s[m][i];
    }
    double slope = std::inner_product(g.begin(), g.end(), dir.begin(), 0.0);
    if (!(slope > 0.0) || !std::isfinite(slope)) {
      dir = g;
      slope = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
      mem_s.clear();
      mem_y.clear();
      mem_rho.clear();
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double t = 1.0;
      while (t >= 1e-14) {
        for (std::size_t i = 0; i < k; ++i) trial[i] = z[i] - t * dir[i];
        const double ft = objective(trial);
        if (ft <= f - 1e-4 * t * slope) {
          gradient(trial, g_next);
          std::vector<double> sv(k), yv(k);
          for (std::size_t i = 0; i < k; ++i) {
            sv[i] = trial[i] - z[i];
            yv[i] = g_next[i] - g[i];
          }
          const double sy = std::inner_product(sv.begin(), sv.end(), yv.begin(), 0.0);
          if (sy > 1e-300) {
            if (mem_s.size() == kMemory) {
              mem_s.erase(mem_s.begin());
              mem_y.erase(mem_y.begin());
              mem_rho.erase(mem_rho.begin());
            }
            mem_s.push_back(std::move(sv));
            mem_y.push_back(std::move(yv));
            mem_rho.push_back(1.0 / sy);
          }
          flat_steps = f - ft <= 1e-15 * std::abs(f) ? flat_steps + 1 : 0;
          z.swap(trial);
          g.swap(g_next);
          f = ft;
          last_step = t;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted && !mem_s.empty()) {
        // Quasi-Newton direction failed; retry once along the gradient.
        dir = g;
        slope = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
      } else if (!accepted) {
        break;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    // The objective no longer resolves the remaining decrease.
    if (flat_steps >= 3) {
      stalled = true;
      break;
    }
  }
  if (newton_refine(gradient, z, g, tol, scale)) {
    result.iterations = it;
    return result;
  }
  const double step = last_step;
  if (!stalled) throw SolverError("numeric prox did not converge", residual);

  // Kink: no descent along the selected subgradient. Diminishing steps from
  // here, keeping the best objective seen, then an exact solve on the tie
  // patterns suggested by the best point.
  result.nonsmooth_polish = true;
  std::vector<double> best = z;
  double f_best = f;
  const double alpha0 = std::min(step, std::min(1.0, eta));
  const std::size_t polish_iters = options.max_iters;
  for (std::size_t j = 0; j < polish_iters; ++j) {
    gradient(z, g);
    const double a = alpha0 / static_cast<double>(j + 1);
    for (std::size_t i = 0; i < k; ++i) z[i] -= a * g[i];
    const double fz = objective(z);
    if (fz < f_best) {
      f_best = fz;
      best = z;
    }
  }
  result.z = cluster_polish(objective, gradient, best, scale);
  result.iterations = it + polish_iters;
  return result;
}

// ---------------------------------------------------------------------------
// Equivariance
// ---------------------------------------------------------------------------

EquivarianceReport check_equivariance(DiffusionOperator op, const EdgePotentialSpec& spec,
                                      std::span<const double> h,
                                      std::span<const std::size_t> perm, double tolerance,
                                      double eta, std::span<const double> degrees) {
  const std::size_t k = h.size();
  if (perm.size() != k) throw ValidationError("permutation length != hyperedge size");
  std::vector<bool> seen(k, false);
  for (std::size_t p : perm) {
    if (p >= k || seen[p]) throw ValidationError("not a permutation");
    seen[p] = true;
  }
  std::vector<double> ph(k), pd(degrees.empty() ? 0 : k);
  for (std::size_t i = 0; i < k; ++i) {
    ph[i] = h[perm[i]];
    if (!degrees.empty()) pd[i] = degrees[perm[i]];
  }
  auto apply = [&](std::span<const double> x, std::span<const double> d) {
    return op == DiffusionOperator::kGradient ? edge_potential_grad(spec, x, d)
                                              : edge_potential_prox(spec, x, eta, d);
  };
  const auto out_perm = apply(ph, pd);
  const auto out = apply(h, degrees);
  EquivarianceReport r;
  r.trials = 1;
  r.tolerance = tolerance;
  for (std::size_t i = 0; i < k; ++i)
    r.max_residual = std::max(r.max_residual, std::abs(out_perm[i] - out[perm[i]]));
  r.passed = r.max_residual <= tolerance;
  return r;
}

EquivarianceReport merge(const EquivarianceReport& a, const EquivarianceReport& b) {
  EquivarianceReport r;
  r.max_residual = std::max(a.max_residual, b.max_residual);
  r.trials = a.trials + b.trials;
  r.tolerance = std::max(a.tolerance, b.tolerance);
  r.passed = r.max_residual <= r.tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

double objective_value(const Hypergraph& h, const Matrix& H, const Matrix& X,
                       const NodePotentialSpec& node_spec, const EdgePotentialSpec& edge_spec) {
  if (H.rows() != h.num_nodes() || X.rows() != h.num_nodes() || H.cols() != X.cols())
    throw ValidationError("objective_value: H and X must both be num_nodes x channels");
  double total = 0.0;
  for (std::size_t v = 0; v < H.rows(); ++v)
    for (std::size_t c = 0; c < H.cols(); ++c) total += node_potential_value(node_spec, H(v, c), X(v, c));
  std::vector<double> he, de;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto members = h.edge(e);
    he.resize(members.size());
    de.resize(edge_spec.needs_degrees() ? members.size() : 0);
    for (std::size_t i = 0; i < de.size(); ++i) de[i] = static_cast<double>(h.degree(members[i]));
    for (std::size_t c = 0; c < H.cols(); ++c) {
      for (std::size_t i = 0; i < members.size(); ++i) he[i] = H(members[i], c);
      total += edge_potential_value(edge_spec, he, de);
    }
  }
  return total;
}

}  // namespace hgdiff
