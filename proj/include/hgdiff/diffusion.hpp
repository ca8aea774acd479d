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
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "hgdiff/hypergraph.hpp"
#include "hgdiff/potentials.hpp"
#include "hgdiff/tensor.hpp"

namespace hgdiff {

/// Iterate of a diffusion solver. Q holds one row per incidence, aligned
/// with Hypergraph::members() (edge-major), and is only used by ADMM.
struct DiffusionState {
  Matrix H;
  Matrix Q;
  Matrix X;
  std::size_t t = 0;
};

struct DiffusionSpecs {
  NodePotentialSpec node;
  EdgePotentialSpec edge;
};

enum class DiffusionMode {
  kGradientDescent,
  kAdmm,
  // ADMM with Q_e tied to H_e every step, so the edge update is prox(H_e).
  kAdmmSimplified,
};

std::string to_string(DiffusionMode mode);

struct SolverConfig {
  double eta = 0.1;
  std::size_t max_iters = 1000;
  double stop_tol = 1e-8;
  bool record_trajectory = false;

  void validate() const;
};

// H = X and Q_e = H_e.
DiffusionState initial_state(const Hypergraph& h, const Matrix& X);

// h_v <- h_v - eta (f'(h_v; x_v) + sum_{e ∋ v} [grad g(H_e)]_v), per channel.
// Throws NumericError naming the first node that turns non-finite.
DiffusionState gd_step(const DiffusionState& state, const Hypergraph& h,
                       const DiffusionSpecs& specs, double eta);

// Q_e <- prox_{eta g}(2 H_e - Q_e) - H_e + Q_e, then
// h_v <- prox_{eta f(.; x_v) / d_v}(sum_{e ∋ v} q_{e,v} / d_v).
// Nodes with d_v = 0 keep their value.
DiffusionState admm_step(const DiffusionState& state, const Hypergraph& h,
                         const DiffusionSpecs& specs, double eta);

// Same node update as admm_step, but with Q_e := prox_{eta g}(H_e).
DiffusionState admm_step_simplified(const DiffusionState& state, const Hypergraph& h,
                                    const DiffusionSpecs& specs, double eta);

DiffusionState diffusion_step(DiffusionMode mode, const DiffusionState& state,
                              const Hypergraph& h, const DiffusionSpecs& specs, double eta);

struct TraceRow {
  std::size_t iter = 0;
  double objective = 0.0;
  double max_change = 0.0;
};

struct DiffusionResult {
  DiffusionState state;
  std::vector<TraceRow> trace;        // row 0 is the initial state
  std::vector<Matrix> iterates;       // H per iteration when recorded
  bool converged = false;
};

/// Steps from H = X until max_iters or until an update changes H by less
/// than stop_tol in max-norm.
DiffusionResult run_diffusion(const Hypergraph& h, const Matrix& X, const DiffusionSpecs& specs,
                              const SolverConfig& config, DiffusionMode mode);

// CSV with header `iter,objective,max_change`.
std::string trajectory_csv(const std::vector<TraceRow>& trace);
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

// Shortest round-trip decimal form used by every CSV writer.
std::string format_real(double v);

}  // namespace hgdiff
