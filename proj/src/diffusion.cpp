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

#include "hgdiff/diffusion.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "hgdiff/dataset_io.hpp"
#include "hgdiff/error.hpp"

namespace hgdiff {

std::string to_string(DiffusionMode mode) {
  switch (mode) {
    case DiffusionMode::kGradientDescent: return "gd";
    case DiffusionMode::kAdmm: return "admm";
    case DiffusionMode::kAdmmSimplified: return "admm_simplified";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("solver eta must be > 0");
  if (max_iters < 1) throw ValidationError("solver max_iters must be >= 1");
  if (!(stop_tol >= 0.0)) throw ValidationError("solver stop_tol must be >= 0");
}

namespace {

void check_shapes(const DiffusionState& s, const Hypergraph& h) {
  if (s.H.rows() != h.num_nodes() || s.X.rows() != h.num_nodes() || s.H.cols() != s.X.cols())
    throw ValidationError("diffusion state: H and X must both be num_nodes x channels");
}

std::vector<double> member_degrees(const Hypergraph& h, std::size_t e, bool needed) {
  std::vector<double> d;
  if (!needed) return d;
  for (std::size_t v : h.edge(e)) d.push_back(static_cast<double>(h.degree(v)));
  return d;
}

void require_finite(const Matrix& H, const char* step) {
  for (std::size_t v = 0; v < H.rows(); ++v)
    for (double x : H.row(v))
      if (!std::isfinite(x))
        throw NumericError(std::string(step) + " produced a non-finite value at node " +
                           std::to_string(v));
}

// h_v <- prox_{eta f / d_v}(sum of incident q / d_v), accumulating in
// ascending edge order so results do not depend on scheduling.
void node_prox_update(DiffusionState& out, const Hypergraph& h, const BipartiteExpansion& bx,
                      const DiffusionSpecs& specs, double eta) {
  const std::size_t channels = out.H.cols();
  for (std::size_t v = 0; v < h.num_nodes(); ++v) {
    const std::size_t d = bx.degree(v);
    if (d == 0) continue;
    const double dv = static_cast<double>(d);
    for (std::size_t c = 0; c < channels; ++c) {
      double acc = 0.0;
      for (std::size_t p : bx.node_pairs(v)) acc += out.Q(p, c);
      out.H(v, c) = node_potential_prox(specs.node, acc / dv, out.X(v, c), eta / dv);
    }
  }
}

}  // namespace

DiffusionState initial_state(const Hypergraph& h, const Matrix& X) {
  if (X.rows() != h.num_nodes()) throw ValidationError("X must have num_nodes rows");
  DiffusionState s;
  s.H = X;
  s.X = X;
  s.Q = Matrix(h.num_incidences(), X.cols());
  const auto members = h.members();
  for (std::size_t p = 0; p < members.size(); ++p) {
    const auto src = X.row(members[p]);
    std::copy(src.begin(), src.end(), s.Q.row(p).begin());
  }
  return s;
}

DiffusionState gd_step(const DiffusionState& state, const Hypergraph& h,
                       const DiffusionSpecs& specs, double eta) {
  check_shapes(state, h);
  const std::size_t channels = state.H.cols();
  const BipartiteExpansion bx(h);
  // Per-incidence edge gradients, then a per-node sum in incidence order.
  Matrix edge_grad(h.num_incidences(), channels);
  std::vector<double> he, ge;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto members = h.edge(e);
    const auto de = member_degrees(h, e, specs.edge.needs_degrees());
    he.resize(members.size());
    ge.resize(members.size());
    const std::size_t base = h.edge_offset(e);
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t i = 0; i < members.size(); ++i) he[i] = state.H(members[i], c);
      edge_potential_grad(specs.edge, he, de, ge);
      for (std::size_t i = 0; i < members.size(); ++i) edge_grad(base + i, c) = ge[i];
    }
  }
  DiffusionState out = state;
  for (std::size_t v = 0; v < h.num_nodes(); ++v) {
    for (std::size_t c = 0; c < channels; ++c) {
      double g = node_potential_grad(specs.node, state.H(v, c), state.X(v, c));
      for (std::size_t p : bx.node_pairs(v)) g += edge_grad(p, c);
      out.H(v, c) = state.H(v, c) - eta * g;
    }
  }
  require_finite(out.H, "gd_step");
  ++out.t;
  return out;
}

DiffusionState admm_step(const DiffusionState& state, const Hypergraph& h,
                         const DiffusionSpecs& specs, double eta) {
  check_shapes(state, h);
  if (state.Q.rows() != h.num_incidences() || state.Q.cols() != state.H.cols())
    throw ValidationError("admm_step: Q must have one row per incidence");
  const std::size_t channels = state.H.cols();
  const BipartiteExpansion bx(h);
  DiffusionState out = state;
  std::vector<double> arg, prox;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto members = h.edge(e);
    const auto de = member_degrees(h, e, specs.edge.needs_degrees());
    const std::size_t base = h.edge_offset(e);
    arg.resize(members.size());
    prox.resize(members.size());
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t i = 0; i < members.size(); ++i)
        arg[i] = 2.0 * state.H(members[i], c) - state.Q(base + i, c);
      edge_potential_prox(specs.edge, arg, eta, de, prox);
      for (std::size_t i = 0; i < members.size(); ++i)
        out.Q(base + i, c) = prox[i] - state.H(members[i], c) + state.Q(base + i, c);
    }
  }
  node_prox_update(out, h, bx, specs, eta);
  require_finite(out.H, "admm_step");
  ++out.t;
  return out;
}

DiffusionState admm_step_simplified(const DiffusionState& state, const Hypergraph& h,
                                    const DiffusionSpecs& specs, double eta) {
  check_shapes(state, h);
  const std::size_t channels = state.H.cols();
  const BipartiteExpansion bx(h);
  DiffusionState out = state;
  out.Q = Matrix(h.num_incidences(), channels);
  std::vector<double> arg, prox;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto members = h.edge(e);
    const auto de = member_degrees(h, e, specs.edge.needs_degrees());
    const std::size_t base = h.edge_offset(e);
    arg.resize(members.size());
    prox.resize(members.size());
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t i = 0; i < members.size(); ++i) arg[i] = state.H(members[i], c);
      edge_potential_prox(specs.edge, arg, eta, de, prox);
      for (std::size_t i = 0; i < members.size(); ++i) out.Q(base + i, c) = prox[i];
    }
  }
  node_prox_update(out, h, bx, specs, eta);
  require_finite(out.H, "admm_step_simplified");
  ++out.t;
  return out;
}

DiffusionState diffusion_step(DiffusionMode mode, const DiffusionState& state,
                              const Hypergraph& h, const DiffusionSpecs& specs, double eta) {
  switch (mode) {
    case DiffusionMode::kGradientDescent: return gd_step(state, h, specs, eta);
    case DiffusionMode::kAdmm: return admm_step(state, h, specs, eta);
    case DiffusionMode::kAdmmSimplified: return admm_step_simplified(state, h, specs, eta);
  }
  return state;
}

DiffusionResult run_diffusion(const Hypergraph& h, const Matrix& X, const DiffusionSpecs& specs,
                              const SolverConfig& config, DiffusionMode mode) {
  config.validate();
  specs.edge.validate();
  DiffusionResult result;
  result.state = initial_state(h, X);
  result.trace.push_back({0, objective_value(h, result.state.H, X, specs.node, specs.edge), 0.0});
  if (config.record_trajectory) result.iterates.push_back(result.state.H);
  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    DiffusionState next = diffusion_step(mode, result.state, h, specs, config.eta);
    const double change = max_abs_diff(next.H, result.state.H);
    result.state = std::move(next);
    result.trace.push_back({it, objective_value(h, result.state.H, X, specs.node, specs.edge), change});
    if (config.record_trajectory) result.iterates.push_back(result.state.H);
    if (change < config.stop_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string trajectory_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "iter,objective,max_change\n";
  for (const auto& row : trace)
    os << row.iter << ',' << format_real(row.objective) << ',' << format_real(row.max_change) << '\n';
  return os.str();
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  write_text_file(path, trajectory_csv(trace));
}

}  // namespace hgdiff
