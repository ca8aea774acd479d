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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hgdiff/hypergraph.hpp"
#include "hgdiff/tensor.hpp"

namespace hgdiff {

// ---------------------------------------------------------------------------
// Node potentials f(h; x)
// ---------------------------------------------------------------------------

enum class NodePotentialKind {
  kQuadratic,  // (h - x)^2
  kLinear,     // -x * h
};

struct NodePotentialSpec {
  NodePotentialKind kind = NodePotentialKind::kQuadratic;
  bool operator==(const NodePotentialSpec&) const = default;
};

double node_potential_value(const NodePotentialSpec& spec, double h, double x);
double node_potential_grad(const NodePotentialSpec& spec, double h, double x);
// argmin_h scale * f(h; x) + 0.5 * (h - z)^2, closed form. scale >= 0.
double node_potential_prox(const NodePotentialSpec& spec, double z, double x, double scale);

// ---------------------------------------------------------------------------
// Hyperedge potentials g(H_e)
// ---------------------------------------------------------------------------

enum class EdgePotentialKind {
  kCliqueExpansion,            // sum over ordered pairs (h_v - h_u)^2
  kCliqueExpansionNormalized,  // same on D_e^{-1/2} H_e
  kDivergenceToMean,           // sum_v (h_v - || H_e / |e| ||_p)^2
  kTotalVariation,             // (max - min)^p
  kLovaszCardinality,          // <y, sort_desc(H_e)>^p
};

/// Declarative hyperedge potential. For kLovaszCardinality an empty `y`
/// selects the cardinality rule (see lec_y_vector).
struct EdgePotentialSpec {
  EdgePotentialKind kind = EdgePotentialKind::kCliqueExpansion;
  double p = 2.0;
  std::optional<std::vector<double>> y;

  static EdgePotentialSpec clique_expansion() { return {EdgePotentialKind::kCliqueExpansion, 2.0, {}}; }
  static EdgePotentialSpec clique_expansion_normalized() {
    return {EdgePotentialKind::kCliqueExpansionNormalized, 2.0, {}};
  }
  static EdgePotentialSpec divergence_to_mean(double p) { return {EdgePotentialKind::kDivergenceToMean, p, {}}; }
  static EdgePotentialSpec total_variation(double p) { return {EdgePotentialKind::kTotalVariation, p, {}}; }
  static EdgePotentialSpec lovasz_cardinality(double p, std::optional<std::vector<double>> y = {}) {
    return {EdgePotentialKind::kLovaszCardinality, p, std::move(y)};
  }

  // Throws ValidationError when p is not allowed for the kind or y is not finite.
  void validate() const;
  bool needs_degrees() const { return kind == EdgePotentialKind::kCliqueExpansionNormalized; }
  // Weight vector used for an edge of the given size (LEC and TV only).
  std::vector<double> weights_for(std::size_t edge_size) const;

  bool operator==(const EdgePotentialSpec&) const = default;
};

std::string to_string(EdgePotentialKind kind);

// Cardinality-rule weights: +2/|e| on the top half, -2/|e| on the bottom half,
// 0 at the middle entry for odd sizes (with 2/(|e|-1) scaling). Sums to zero.
std::vector<double> lec_y_vector(std::size_t edge_size);

// `degrees` holds the node degrees of the members of e, aligned with `h`; it is
// required for kCliqueExpansionNormalized and ignored otherwise.
double edge_potential_value(const EdgePotentialSpec& spec, std::span<const double> h,
                            std::span<const double> degrees = {});

// Gradient where smooth. At ties LEC uses a stable descending sort and TV puts
// the full weight on the lowest-index argmax / argmin.
void edge_potential_grad(const EdgePotentialSpec& spec, std::span<const double> h,
                         std::span<const double> degrees, std::span<double> out);
std::vector<double> edge_potential_grad(const EdgePotentialSpec& spec, std::span<const double> h,
                                        std::span<const double> degrees = {});

/// prox_{eta g}(h) = argmin_z eta * g(z) + 0.5 * ||z - h||^2.
///
/// CE and normalized CE use Sherman-Morrison closed forms. TV and LEC with a
/// non-increasing weight vector are solved exactly: for p = 1 g is the support
/// function of the permutohedron of y, so the prox is h minus a projection
/// computed by isotonic regression; for p = 2 a scalar fixed point on the
/// multiplier is bracketed and bisected. Every other case falls back to
/// numeric_edge_prox.
void edge_potential_prox(const EdgePotentialSpec& spec, std::span<const double> h, double eta,
                         std::span<const double> degrees, std::span<double> out);
std::vector<double> edge_potential_prox(const EdgePotentialSpec& spec, std::span<const double> h,
                                        double eta, std::span<const double> degrees = {});

struct NumericProxOptions {
  std::size_t max_iters = 10000;
  double grad_tol = 1e-11;
};

struct NumericProxResult {
  std::vector<double> z;
  std::size_t iterations = 0;
  // True when the iterate stalled at a kink and the subgradient polish ran.
  bool nonsmooth_polish = false;
};

/// Generic prox on the 1-strongly-convex prox objective: L-BFGS with an
/// Armijo line search while the objective is locally smooth, finished by a
/// few Newton steps on a finite-difference Jacobian. If a kink stalls the
/// line search, a diminishing subgradient polish with best-iterate tracking
/// takes over. Throws SolverError if the smooth phase exhausts max_iters.
NumericProxResult numeric_edge_prox(const EdgePotentialSpec& spec, std::span<const double> h,
                                    double eta, std::span<const double> degrees = {},
                                    const NumericProxOptions& options = {});

// ---------------------------------------------------------------------------
// Equivariance checking
// ---------------------------------------------------------------------------

enum class DiffusionOperator { kGradient, kProx };

struct EquivarianceReport {
  double max_residual = 0.0;
  std::size_t trials = 0;
  double tolerance = 0.0;
  bool passed = true;
};

/// residual = max |op(P h) - P op(h)| where (P h)_i = h_{perm[i]}. Degrees are
/// permuted along with h.
EquivarianceReport check_equivariance(DiffusionOperator op, const EdgePotentialSpec& spec,
                                      std::span<const double> h,
                                      std::span<const std::size_t> perm, double tolerance,
                                      double eta = 1.0, std::span<const double> degrees = {});

// Folds several reports into one (max residual, summed trials).
EquivarianceReport merge(const EquivarianceReport& a, const EquivarianceReport& b);

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

/// sum_v f(h_v; x_v) + sum_e g(H_e), summed over feature channels.
double objective_value(const Hypergraph& h, const Matrix& H, const Matrix& X,
                       const NodePotentialSpec& node_spec, const EdgePotentialSpec& edge_spec);

}  // namespace hgdiff
