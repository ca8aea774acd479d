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

#include <cmath>
#include <limits>
#include <vector>

#include "hgdiff/diffusion.hpp"
#include "hgdiff/error.hpp"
#include "hgdiff/potentials.hpp"
#include "hgdiff/rng.hpp"
#include "hgdiff/synth.hpp"
#include "test_util.hpp"

namespace hgdiff {
namespace {

const DiffusionSpecs kCe{{}, EdgePotentialSpec::clique_expansion()};

Hypergraph pair_graph() { return Hypergraph::build({{0, 1}}, 2); }

Matrix col(std::initializer_list<double> v) { return Matrix::column(std::vector<double>(v)); }

DiffusionState state_of(const Hypergraph& h, const Matrix& H, const Matrix& X) {
  DiffusionState s = initial_state(h, X);
  s.H = H;
  for (std::size_t p = 0; p < h.num_incidences(); ++p) s.Q(p, 0) = H(h.members()[p], 0);
  return s;
}

// Random instance: uniform hypergraph with size-varying edges plus features.
Hypergraph random_graph(Rng& rng, std::size_t n) {
  std::vector<std::vector<std::size_t>> edges;
  for (std::size_t e = 0; e < n; ++e) edges.push_back(rng.sample_without_replacement(n, 2 + rng.uniform_index(4)));
  return Hypergraph::build(edges, n);
}

TEST(Objective, TwoNodeInstance) {
  EXPECT_DOUBLE_EQ(objective_value(pair_graph(), col({1, 0}), col({0, 0}), kCe.node, kCe.edge), 3.0);
  EXPECT_DOUBLE_EQ(objective_value(pair_graph(), col({2, 2}), col({2, 2}), kCe.node, kCe.edge), 0.0);
}

TEST(Objective, InvariantUnderRelabeling) {
  Rng rng(1);
  const Hypergraph h = random_graph(rng, 12);
  const Matrix H = testing::normal_matrix(rng, 12, 2), X = testing::normal_matrix(rng, 12, 2);
  const auto perm = rng.permutation(12);
  const double a = objective_value(h, H, X, kCe.node, EdgePotentialSpec::total_variation(2.0));
  const double b = objective_value(permute_nodes(h, perm), testing::permute_rows(H, perm),
                                   testing::permute_rows(X, perm), kCe.node, EdgePotentialSpec::total_variation(2.0));
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(GdStep, TwoNodeInstance) {
  const Hypergraph h = pair_graph();
  const DiffusionState s = gd_step(state_of(h, col({1, 0}), col({0, 0})), h, kCe, 0.1);
  EXPECT_NEAR(s.H(0, 0), 0.4, 1e-15);
  EXPECT_NEAR(s.H(1, 0), 0.4, 1e-15);
  EXPECT_EQ(s.t, 1u);
}

TEST(GdStep, ZeroStepAndStationaryPoint) {
  Rng rng(2);
  const Hypergraph h = random_graph(rng, 10);
  const Matrix X = testing::normal_matrix(rng, 10, 1);
  const DiffusionState s = state_of(h, testing::normal_matrix(rng, 10, 1), X);
  EXPECT_EQ(gd_step(s, h, kCe, 0.0).H, s.H);
  const SolverConfig cfg{0.02, 20000, 1e-14, false};
  const DiffusionResult r = run_diffusion(h, X, kCe, cfg, DiffusionMode::kGradientDescent);
  const DiffusionState again = gd_step(r.state, h, kCe, 0.02);
  EXPECT_LE(max_abs_diff(again.H, r.state.H), 1e-12);
}

TEST(GdStep, ReportsNonFiniteNode) {
  const Hypergraph h = pair_graph();
  const double big = std::numeric_limits<double>::max();
  EXPECT_THROW(gd_step(state_of(h, col({big, -big}), col({0, 0})), h, kCe, 1.0), NumericError);
}

TEST(AdmmStep, TwoNodeInstance) {
  const Hypergraph h = pair_graph();
  const DiffusionState s = admm_step(state_of(h, col({1, 0}), col({0, 0})), h, kCe, 0.25);
  EXPECT_NEAR(s.Q(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.Q(1, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.H(0, 0), 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(s.H(1, 0), 2.0 / 9.0, 1e-15);
}

TEST(AdmmStep, ZeroStepCopiesNodeValuesIntoQ) {
  Rng rng(3);
  const Hypergraph h = random_graph(rng, 8);
  DiffusionState s = state_of(h, testing::normal_matrix(rng, 8, 1), testing::normal_matrix(rng, 8, 1));
  for (double& q : s.Q.values()) q += rng.normal();
  const DiffusionState out = admm_step(s, h, kCe, 0.0);
  for (std::size_t p = 0; p < h.num_incidences(); ++p)
    EXPECT_NEAR(out.Q(p, 0), s.H(h.members()[p], 0), 1e-14);
  for (std::size_t v = 0; v < 8; ++v) EXPECT_NEAR(out.H(v, 0), s.H(v, 0), 1e-14);
}

TEST(AdmmStep, SimplifiedModeEqualsGeneralStepAtStart) {
  Rng rng(4);
  for (const auto& edge : {EdgePotentialSpec::clique_expansion(), EdgePotentialSpec::total_variation(2.0),
                           EdgePotentialSpec::lovasz_cardinality(1.0)}) {
    const Hypergraph h = random_graph(rng, 10);
    const Matrix X = testing::normal_matrix(rng, 10, 2);
    const DiffusionState s = initial_state(h, X);
    const DiffusionSpecs specs{{}, edge};
    const DiffusionState a = admm_step(s, h, specs, 0.3);
    const DiffusionState b = admm_step_simplified(s, h, specs, 0.3);
    EXPECT_LE(max_abs_diff(a.H, b.H), 1e-12);
    EXPECT_LE(max_abs_diff(a.Q, b.Q), 1e-12);
  }
}

TEST(AdmmStep, FixedPointIsStable) {
  Rng rng(5);
  const Hypergraph h = random_graph(rng, 10);
  const Matrix X = testing::normal_matrix(rng, 10, 1);
  const SolverConfig cfg{0.5, 20000, 1e-13, false};
  const DiffusionResult r = run_diffusion(h, X, kCe, cfg, DiffusionMode::kAdmm);
  ASSERT_TRUE(r.converged);
  const DiffusionState again = admm_step(r.state, h, kCe, 0.5);
  EXPECT_LE(max_abs_diff(again.H, r.state.H), 1e-12);
}

TEST(RunDiffusion, GdObjectiveNeverIncreases) {
  Rng rng(6);
  const Hypergraph h = gen_uniform_hypergraph(50, 40, 4, 6);
  const Matrix X = testing::normal_matrix(rng, 50, 1);
  const SolverConfig cfg{1e-3, 50, 0.0, false};
  const DiffusionResult r = run_diffusion(h, X, kCe, cfg, DiffusionMode::kGradientDescent);
  ASSERT_EQ(r.trace.size(), 51u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i].objective, r.trace[i - 1].objective);
}

TEST(RunDiffusion, GdAndAdmmReachTheSameMinimizer) {
  Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const std::size_t n = 10 + rng.uniform_index(40);
    const Hypergraph h = random_graph(rng, n);
    const Matrix X = testing::normal_matrix(rng, n, 1);
    const DiffusionResult gd =
        run_diffusion(h, X, kCe, {0.01, 200000, 1e-13, false}, DiffusionMode::kGradientDescent);
    const DiffusionResult admm = run_diffusion(h, X, kCe, {0.5, 200000, 1e-13, false}, DiffusionMode::kAdmm);
    ASSERT_TRUE(gd.converged);
    ASSERT_TRUE(admm.converged);
    EXPECT_NEAR(gd.trace.back().objective, admm.trace.back().objective, 1e-4);
    EXPECT_LE(max_abs_diff(gd.state.H, admm.state.H), 1e-4);
  }
}

TEST(RunDiffusion, InfiniteToleranceStopsAfterOneStep) {
  const Hypergraph h = pair_graph();
  const SolverConfig cfg{0.1, 100, std::numeric_limits<double>::infinity(), false};
  const DiffusionResult r = run_diffusion(h, col({1, 0}), kCe, cfg, DiffusionMode::kGradientDescent);
  EXPECT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.state.t, 1u);
}

TEST(RunDiffusion, EquivariantUnderRelabeling) {
  Rng rng(8);
  const Hypergraph h = random_graph(rng, 15);
  const Matrix X = testing::normal_matrix(rng, 15, 1);
  const auto perm = rng.permutation(15);
  const DiffusionSpecs specs{{}, EdgePotentialSpec::total_variation(2.0)};
  for (auto mode : {DiffusionMode::kGradientDescent, DiffusionMode::kAdmm}) {
    const SolverConfig cfg{0.05, 30, 0.0, false};
    const Matrix a = run_diffusion(h, X, specs, cfg, mode).state.H;
    const Matrix b = run_diffusion(permute_nodes(h, perm), testing::permute_rows(X, perm), specs, cfg, mode).state.H;
    EXPECT_LE(max_abs_diff(testing::permute_rows(a, perm), b), 1e-12) << to_string(mode);
  }
}

TEST(RunDiffusion, RecordsIteratesAndWritesTrace) {
  const Hypergraph h = pair_graph();
  const SolverConfig cfg{0.1, 3, 0.0, true};
  const DiffusionResult r = run_diffusion(h, col({1, 0}), kCe, cfg, DiffusionMode::kGradientDescent);
  EXPECT_EQ(r.iterates.size(), 4u);
  const std::string csv = trajectory_csv(r.trace);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,objective,max_change");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(SolverConfig, Validates) {
  EXPECT_THROW((SolverConfig{-1.0, 10, 1e-8, false}).validate(), ValidationError);
  EXPECT_THROW((SolverConfig{0.1, 0, 1e-8, false}).validate(), ValidationError);
}

}  // namespace
}  // namespace hgdiff
