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

#include "hgdiff/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

#include "hgdiff/diffusion.hpp"
#include "hgdiff/edhnn.hpp"
#include "hgdiff/error.hpp"
#include "hgdiff/potentials.hpp"
#include "hgdiff/power_sum.hpp"
#include "hgdiff/rng.hpp"
#include "hgdiff/synth.hpp"
#include "json.hpp"

namespace hgdiff {

namespace {

using GradFn = std::function<std::vector<double>(const EdgePotentialSpec&, std::span<const double>,
                                                 std::span<const double>)>;

GradFn make_grad_fn(bool inject_fault) {
  return [inject_fault](const EdgePotentialSpec& spec, std::span<const double> h, std::span<const double> deg) {
    auto g = edge_potential_grad(spec, h, deg);
    if (inject_fault && spec.kind == EdgePotentialKind::kTotalVariation && !h.empty()) {
      const auto lo = static_cast<std::size_t>(std::min_element(h.begin(), h.end()) - h.begin());
      g[lo] = -g[lo];
    }
    return g;
  };
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

std::vector<double> random_degrees(Rng& rng, std::size_t n) {
  std::vector<double> d(n);
  for (double& x : d) x = static_cast<double>(1 + rng.uniform_index(5));
  return d;
}

std::vector<EdgePotentialSpec> equivariance_specs() {
  return {EdgePotentialSpec::clique_expansion(),       EdgePotentialSpec::clique_expansion_normalized(),
          EdgePotentialSpec::divergence_to_mean(2.0),  EdgePotentialSpec::total_variation(1.0),
          EdgePotentialSpec::total_variation(2.0),     EdgePotentialSpec::lovasz_cardinality(1.0),
          EdgePotentialSpec::lovasz_cardinality(2.0)};
}

std::vector<EdgePotentialSpec> convex_specs() {
  return {EdgePotentialSpec::clique_expansion(),      EdgePotentialSpec::clique_expansion_normalized(),
          EdgePotentialSpec::total_variation(1.0),    EdgePotentialSpec::total_variation(2.0),
          EdgePotentialSpec::lovasz_cardinality(1.0), EdgePotentialSpec::lovasz_cardinality(2.0)};
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SuiteResult finish(SuiteResult r) {
  r.passed = r.max_residual <= r.tolerance;
  return r;
}

SuiteResult suite_worked_example(const GradFn& grad) {
  SuiteResult r{"lec_worked_example", 1, 0.0, 1e-12, true, "LEC p=2, y=[1,-1,0] at [0.7,0.5,0.3]"};
  const std::vector<double> h = {0.7, 0.5, 0.3};
  const auto g = grad(EdgePotentialSpec::lovasz_cardinality(2.0, std::vector<double>{1.0, -1.0, 0.0}), h, {});
  r.max_residual = max_abs_diff(g, std::vector<double>{0.4, -0.4, 0.0});
  return finish(r);
}

SuiteResult suite_equivariance(const GradFn& grad, Rng rng) {
  SuiteResult r{"equivariance", 0, 0.0, 1e-9, true, "gradient and prox, |e| in [2,10]"};
  const auto specs = equivariance_specs();
  for (std::size_t trial = 0; trial < 140; ++trial) {
    const auto& spec = specs[trial % specs.size()];
    const std::size_t n = 2 + rng.uniform_index(9);
    const auto h = random_vector(rng, n);
    const auto deg = random_degrees(rng, n);
    const auto perm = rng.permutation(n);
    const double eta = rng.uniform(0.05, 2.0);
    std::vector<double> ph(n), pdeg(n);
    for (std::size_t i = 0; i < n; ++i) {
      ph[i] = h[perm[i]];
      pdeg[i] = deg[perm[i]];
    }
    const auto g = grad(spec, h, deg);
    const auto pg = grad(spec, ph, pdeg);
    const auto z = edge_potential_prox(spec, h, eta, deg);
    const auto pz = edge_potential_prox(spec, ph, eta, pdeg);
    for (std::size_t i = 0; i < n; ++i) {
      r.max_residual = std::max(r.max_residual, std::abs(pg[i] - g[perm[i]]));
      r.max_residual = std::max(r.max_residual, std::abs(pz[i] - z[perm[i]]));
    }
    ++r.trials;
  }
  return finish(r);
}

SuiteResult suite_gradient(const GradFn& grad, Rng rng) {
  SuiteResult r{"potential_gradcheck", 0, 0.0, 1e-5, true, "central differences, step 1e-6, relative"};
  const std::vector<EdgePotentialSpec> specs = {
      EdgePotentialSpec::clique_expansion(),      EdgePotentialSpec::clique_expansion_normalized(),
      EdgePotentialSpec::divergence_to_mean(2.0), EdgePotentialSpec::total_variation(1.0),
      EdgePotentialSpec::total_variation(2.0),    EdgePotentialSpec::lovasz_cardinality(2.0)};
  const double step = 1e-6;
  for (std::size_t trial = 0; trial < 60; ++trial) {
    const auto& spec = specs[trial % specs.size()];
    const std::size_t n = 2 + rng.uniform_index(7);
    auto h = random_vector(rng, n);
    const auto deg = random_degrees(rng, n);
    const auto g = grad(spec, h, deg);
    for (std::size_t i = 0; i < n; ++i) {
      const double saved = h[i];
      h[i] = saved + step;
      const double up = edge_potential_value(spec, h, deg);
      h[i] = saved - step;
      const double down = edge_potential_value(spec, h, deg);
      h[i] = saved;
      const double fd = (up - down) / (2.0 * step);
      r.max_residual = std::max(r.max_residual, std::abs(g[i] - fd) / std::max(1.0, std::abs(fd)));
    }
    ++r.trials;
  }
  return finish(r);
}

SuiteResult suite_nonexpansive(Rng rng) {
  SuiteResult r{"prox_nonexpansive", 0, 0.0, 1e-9, true, "max(0, |prox a - prox b| - |a - b|)"};
  for (const auto& spec : convex_specs()) {
    for (std::size_t trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + rng.uniform_index(9);
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      const auto deg = random_degrees(rng, n);
      const double eta = rng.uniform(0.05, 2.0);
      const auto pa = edge_potential_prox(spec, a, eta, deg);
      const auto pb = edge_potential_prox(spec, b, eta, deg);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        num += (pa[i] - pb[i]) * (pa[i] - pb[i]);
        den += (a[i] - b[i]) * (a[i] - b[i]);
      }
      r.max_residual = std::max(r.max_residual, std::sqrt(num) - std::sqrt(den));
      ++r.trials;
    }
  }
  r.max_residual = std::max(r.max_residual, 0.0);
  return finish(r);
}

SuiteResult suite_power_sum(Rng rng) {
  SuiteResult r{"power_sum_roundtrip", 0, 0.0, 1e-6, true, "K = M in 1..5"};
  for (std::size_t k = 1; k <= 5; ++k) {
    for (std::size_t trial = 0; trial < 100; ++trial) {
      std::vector<double> z(k);
      for (double& v : z) v = rng.uniform();
      std::sort(z.begin(), z.end());
      const auto back = power_sum_decode(power_sum_encode(z, k), k);
      r.max_residual = std::max(r.max_residual, max_abs_diff(back, z));
      ++r.trials;
    }
  }
  return finish(r);
}

SuiteResult suite_ce_construction(const GradFn& grad, Rng rng) {
  SuiteResult r{"ce_construction", 0, 0.0, 1e-9, true, "phi(h)=(h,1), rho=4(nh-S) vs CE gradient"};
  const auto fns = clique_expansion_functions(0.1);
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(9);
    const auto h = random_vector(rng, n);
    std::vector<std::vector<double>> members;
    for (double v : h) members.push_back({v});
    const auto msgs = edge_messages(fns, members);
    const auto g = grad(EdgePotentialSpec::clique_expansion(), h, {});
    for (std::size_t i = 0; i < n; ++i) r.max_residual = std::max(r.max_residual, std::abs(msgs[i][0] - g[i]));
    ++r.trials;
  }
  Hypergraph two = Hypergraph::build({{0, 1}}, 2);
  const Matrix H = Matrix::from_rows({{1.0}, {0.0}});
  const Matrix X = Matrix::from_rows({{0.0}, {0.0}});
  const EdHnnModel model = clique_expansion_model(0.1, 2);
  const Matrix out = model.forward(two, X, nullptr, {false, nullptr, &H});
  r.max_residual = std::max(r.max_residual, std::max(std::abs(out(0, 0) - 0.4), std::abs(out(1, 0) - 0.4)));
  ++r.trials;
  return finish(r);
}

SuiteResult suite_gd_monotone(Rng rng) {
  SuiteResult r{"gd_monotone", 0, 0.0, 1e-12, true, "CE + quadratic, eta = 1e-3, 50 steps; relative increase"};
  for (std::size_t trial = 0; trial < 3; ++trial) {
    const Hypergraph h = gen_uniform_hypergraph(50, 40, 2 + rng.uniform_index(5), rng.next_u64());
    Matrix X(50, 1);
    for (double& v : X.values()) v = rng.normal();
    const DiffusionSpecs specs{{}, EdgePotentialSpec::clique_expansion()};
    DiffusionState s = initial_state(h, X);
    for (double& v : s.H.values()) v += rng.normal();
    double prev = objective_value(h, s.H, X, specs.node, specs.edge);
    for (std::size_t t = 0; t < 50; ++t) {
      s = gd_step(s, h, specs, 1e-3);
      const double cur = objective_value(h, s.H, X, specs.node, specs.edge);
      r.max_residual = std::max(r.max_residual, (cur - prev) / std::max(1.0, std::abs(prev)));
      prev = cur;
    }
    ++r.trials;
  }
  r.max_residual = std::max(r.max_residual, 0.0);
  return finish(r);
}

Hypergraph small_hypergraph() { return Hypergraph::build({{0, 1, 2}, {1, 3}, {2, 3, 4, 5}, {0, 5}}, 6); }

EdHnnConfig small_config(ModelVariant variant) {
  EdHnnConfig c;
  c.variant = variant;
  c.num_iterations = 2;
  c.input_dim = 3;
  c.hidden_dim = 4;
  c.encoder_layers = 1;
  c.phi_layers = 2;
  c.rho_layers = 2;
  c.update_layers = 2;
  c.classifier_layers = 2;
  c.classifier_hidden = 4;
  c.output_dim = 2;
  c.input_dropout = 0.0;
  c.dropout = 0.0;
  return c;
}

SuiteResult suite_model_gradcheck(Rng rng) {
  SuiteResult r{"model_gradcheck", 0, 0.0, 1e-4, true, "all variants, central differences, relative"};
  const Hypergraph h = small_hypergraph();
  for (ModelVariant variant : {ModelVariant::kEdHnn, ModelVariant::kEdHnnII, ModelVariant::kInvariantBaseline}) {
    Rng init = rng.fork(static_cast<std::uint64_t>(variant));
    EdHnnModel model(small_config(variant), init);
    if (variant == ModelVariant::kEdHnnII)
      for (double& v : model.mutable_initial_message().values()) v = init.normal();
    Matrix X(6, 3);
    for (double& v : X.values()) v = rng.normal();
    Matrix w(6, 2);
    for (double& v : w.values()) v = rng.normal();
    auto loss_of = [&](const EdHnnModel& m) {
      const Matrix out = m.forward(h, X, nullptr);
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) s += out.values()[i] * w.values()[i];
      return s;
    };
    EdHnnCache cache;
    model.forward(h, X, &cache);
    EdHnnGrads grads = model.zero_grads();
    model.backward(h, cache, w, grads);
    const auto gptr = EdHnnModel::gradient_pointers(grads);
    const auto params = model.parameter_pointers();
    const double step = 1e-6;
    for (std::size_t t = 0; t < params.size(); ++t) {
      auto values = params[t]->values();
      for (std::size_t k = 0; k < values.size(); ++k) {
        const double saved = values[k];
        values[k] = saved + step;
        const double up = loss_of(model);
        values[k] = saved - step;
        const double down = loss_of(model);
        values[k] = saved;
        const double fd = (up - down) / (2.0 * step);
        const double an = gptr[t]->values()[k];
        r.max_residual = std::max(r.max_residual, std::abs(an - fd) / std::max({1e-2, std::abs(an), std::abs(fd)}));
      }
    }
    ++r.trials;
  }
  return finish(r);
}

SuiteResult suite_model_equivariance(Rng rng) {
  SuiteResult r{"model_equivariance", 0, 0.0, 0.0, true, "node relabeling, bitwise"};
  const Hypergraph h = small_hypergraph();
  for (ModelVariant variant : {ModelVariant::kEdHnn, ModelVariant::kEdHnnII, ModelVariant::kInvariantBaseline}) {
    Rng init = rng.fork(100 + static_cast<std::uint64_t>(variant));
    const EdHnnModel model(small_config(variant), init);
    Matrix X(6, 3);
    for (double& v : X.values()) v = rng.normal();
    const auto perm = rng.permutation(6);
    const Hypergraph ph = permute_nodes(h, perm);
    Matrix PX(6, 3);
    for (std::size_t v = 0; v < 6; ++v)
      for (std::size_t c = 0; c < 3; ++c) PX(perm[v], c) = X(v, c);
    const Matrix out = model.forward(h, X, nullptr);
    const Matrix pout = model.forward(ph, PX, nullptr);
    for (std::size_t v = 0; v < 6; ++v)
      for (std::size_t c = 0; c < out.cols(); ++c)
        r.max_residual = std::max(r.max_residual, std::abs(pout(perm[v], c) - out(v, c)));
    ++r.trials;
  }
  return finish(r);
}

}  // namespace

std::vector<std::string> check_suite_names() {
  return {"lec_worked_example", "equivariance",       "potential_gradcheck", "prox_nonexpansive",
          "power_sum_roundtrip", "ce_construction",   "gd_monotone",         "model_gradcheck",
          "model_equivariance"};
}

std::vector<SuiteResult> run_checks(const CheckOptions& options) {
  const auto names = check_suite_names();
  for (const auto& s : options.suites)
    if (std::find(names.begin(), names.end(), s) == names.end())
      throw ValidationError("unknown check suite '" + s + "'");
  const GradFn grad = make_grad_fn(options.inject_tv_sign_fault);
  const Rng root(options.seed);
  std::vector<SuiteResult> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& name = names[i];
    if (!options.suites.empty() && std::find(options.suites.begin(), options.suites.end(), name) == options.suites.end())
      continue;
    const Rng rng = root.fork(i + 1);
    if (name == "lec_worked_example") out.push_back(suite_worked_example(grad));
    else if (name == "equivariance") out.push_back(suite_equivariance(grad, rng));
    else if (name == "potential_gradcheck") out.push_back(suite_gradient(grad, rng));
    else if (name == "prox_nonexpansive") out.push_back(suite_nonexpansive(rng));
    else if (name == "power_sum_roundtrip") out.push_back(suite_power_sum(rng));
    else if (name == "ce_construction") out.push_back(suite_ce_construction(grad, rng));
    else if (name == "gd_monotone") out.push_back(suite_gd_monotone(rng));
    else if (name == "model_gradcheck") out.push_back(suite_model_gradcheck(rng));
    else if (name == "model_equivariance") out.push_back(suite_model_equivariance(rng));
  }
  return out;
}

std::string check_report_json(const std::vector<SuiteResult>& results, const CheckOptions& options) {
  nlohmann::json suites = nlohmann::json::array();
  bool passed = true;
  for (const auto& r : results) {
    passed = passed && r.passed;
    suites.push_back({{"name", r.name},
                      {"trials", r.trials},
                      {"max_residual", r.max_residual},
                      {"tolerance", r.tolerance},
                      {"passed", r.passed},
                      {"note", r.note}});
  }
  nlohmann::json doc{{"passed", passed},
                     {"seed", options.seed},
                     {"inject_tv_sign_fault", options.inject_tv_sign_fault},
                     {"suites", std::move(suites)}};
  return doc.dump(2) + "\n";
}

}  // namespace hgdiff
