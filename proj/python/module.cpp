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


#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hgdiff/cli.hpp"
#include "hgdiff/diffusion.hpp"
#include "hgdiff/error.hpp"
#include "hgdiff/hypergraph.hpp"
#include "hgdiff/potentials.hpp"
#include "hgdiff/power_sum.hpp"
#include "hgdiff/synth.hpp"

namespace py = pybind11;

namespace hgdiff {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() == 1) return Matrix::column(std::vector<double>(a.data(), a.data() + a.size()));
  if (a.ndim() != 2) throw ValidationError("expected a 1-d or 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.values().begin());
  return m;
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

EdgePotentialSpec make_spec(const std::string& kind, double p, std::optional<std::vector<double>> y) {
  if (kind == "ce") return EdgePotentialSpec::clique_expansion();
  if (kind == "ce_norm") return EdgePotentialSpec::clique_expansion_normalized();
  if (kind == "div_mean") return EdgePotentialSpec::divergence_to_mean(p);
  if (kind == "tv") return EdgePotentialSpec::total_variation(p);
  if (kind == "lec") return EdgePotentialSpec::lovasz_cardinality(p, std::move(y));
  throw ValidationError("unknown potential kind '" + kind + "' (ce, ce_norm, div_mean, tv, lec)");
}

DiffusionMode make_mode(const std::string& mode) {
  if (mode == "gd") return DiffusionMode::kGradientDescent;
  if (mode == "admm") return DiffusionMode::kAdmm;
  if (mode == "admm_simplified") return DiffusionMode::kAdmmSimplified;
  throw ValidationError("unknown mode '" + mode + "' (gd, admm, admm_simplified)");
}

}  // namespace
}  // namespace hgdiff

PYBIND11_MODULE(_hgdiff, m) {
  using namespace hgdiff;
  m.doc() = "Hypergraph diffusion operators and equivariant diffusion networks.";

  py::register_exception<Error>(m, "HgdiffError", PyExc_ValueError);

  py::class_<Hypergraph>(m, "Hypergraph")
      .def(py::init(&Hypergraph::build), py::arg("edges"), py::arg("num_nodes"))
      .def_property_readonly("num_nodes", &Hypergraph::num_nodes)
      .def_property_readonly("num_edges", &Hypergraph::num_edges)
      .def_property_readonly("num_incidences", &Hypergraph::num_incidences)
      .def("edges", &Hypergraph::edge_lists)
      .def("degrees", [](const Hypergraph& h) {
        const auto d = h.node_degrees();
        return std::vector<std::size_t>(d.begin(), d.end());
      })
      .def("__repr__", [](const Hypergraph& h) {
        std::ostringstream s;
        s << "Hypergraph(num_nodes=" << h.num_nodes() << ", num_edges=" << h.num_edges() << ")";
        return s.str();
      });

  m.def("ce_homophily", [](const Hypergraph& h, const std::vector<std::size_t>& labels) {
    return ce_homophily(h, labels);
  });

  m.def(
      "edge_potential_value",
      [](const std::string& kind, const std::vector<double>& h, double p, std::optional<std::vector<double>> y,
         const std::vector<double>& degrees) { return edge_potential_value(make_spec(kind, p, y), h, degrees); },
      py::arg("kind"), py::arg("h"), py::arg("p") = 2.0, py::arg("y") = py::none(),
      py::arg("degrees") = std::vector<double>{});
  m.def(
      "edge_potential_grad",
      [](const std::string& kind, const std::vector<double>& h, double p, std::optional<std::vector<double>> y,
         const std::vector<double>& degrees) { return edge_potential_grad(make_spec(kind, p, y), h, degrees); },
      py::arg("kind"), py::arg("h"), py::arg("p") = 2.0, py::arg("y") = py::none(),
      py::arg("degrees") = std::vector<double>{});
  m.def(
      "edge_potential_prox",
      [](const std::string& kind, const std::vector<double>& h, double eta, double p,
         std::optional<std::vector<double>> y, const std::vector<double>& degrees) {
        return edge_potential_prox(make_spec(kind, p, y), h, eta, degrees);
      },
      py::arg("kind"), py::arg("h"), py::arg("eta"), py::arg("p") = 2.0, py::arg("y") = py::none(),
      py::arg("degrees") = std::vector<double>{});

  m.def(
      "power_sum_encode", [](const std::vector<double>& z, std::size_t degree) { return power_sum_encode(z, degree); },
      py::arg("z"), py::arg("degree"));
  m.def(
      "power_sum_decode",
      [](const std::vector<double>& moments, std::size_t count) { return power_sum_decode(moments, count); },
      py::arg("moments"), py::arg("count"));

  m.def(
      "run_diffusion",
      [](const Hypergraph& h, const Array& X, const std::string& kind, double p, const std::string& mode, double eta,
         std::size_t max_iters, double stop_tol) {
        const DiffusionSpecs specs{{}, make_spec(kind, p, std::nullopt)};
        const DiffusionResult r = run_diffusion(h, to_matrix(X), specs, {eta, max_iters, stop_tol, false},
                                                make_mode(mode));
        std::vector<double> objective;
        for (const auto& row : r.trace) objective.push_back(row.objective);
        return py::make_tuple(to_array(r.state.H), objective, r.converged);
      },
      py::arg("hypergraph"), py::arg("X"), py::arg("kind") = "ce", py::arg("p") = 2.0, py::arg("mode") = "gd",
      py::arg("eta") = 0.1, py::arg("max_iters") = 1000, py::arg("stop_tol") = 1e-8,
      "Runs diffusion from H = X. Returns (H, objective trace, converged).");

  m.def(
      "gen_csbm",
      [](std::size_t alpha, std::size_t nodes_per_class, std::size_t num_hyperedges, std::size_t edge_size,
         std::uint64_t seed) {
        CsbmConfig c;
        c.alpha = alpha;
        c.nodes_per_class = nodes_per_class;
        c.num_hyperedges = num_hyperedges;
        c.edge_size = edge_size;
        c.seed = seed;
        LabeledHypergraph d = gen_csbm(c);
        return py::make_tuple(d.hypergraph, *d.labels);
      },
      py::arg("alpha"), py::arg("nodes_per_class") = 2500, py::arg("num_hyperedges") = 1000,
      py::arg("edge_size") = 15, py::arg("seed") = 0, "Returns (hypergraph, labels).");

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config, std::optional<std::string> out,
         std::optional<std::uint64_t> seed) {
        std::ostringstream log, err;
        std::optional<std::filesystem::path> out_path;
        if (out) out_path = *out;
        const int code = run_command({command, config, out_path, seed}, log, err);
        return py::make_tuple(code, log.str(), err.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
      "Runs a CLI command in-process. Returns (exit code, log, error text).");
}
