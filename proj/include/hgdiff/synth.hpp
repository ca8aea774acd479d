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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hgdiff/diffusion.hpp"
#include "hgdiff/hypergraph.hpp"
#include "hgdiff/potentials.hpp"
#include "hgdiff/tensor.hpp"

namespace hgdiff {

/// Two-class hypergraph stochastic block model. Each hyperedge takes `alpha`
/// nodes from one class and edge_size - alpha from the other.
struct CsbmConfig {
  std::size_t nodes_per_class = 2500;
  std::size_t num_classes = 2;
  std::size_t num_hyperedges = 1000;
  std::size_t edge_size = 15;
  std::size_t alpha = 1;
  // Pick the minority class uniformly per hyperedge; false pins it to class 1.
  bool randomize_minority = true;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const CsbmConfig&) const = default;
};

// Nodes [c * nodes_per_class, (c + 1) * nodes_per_class) carry label c.
LabeledHypergraph gen_csbm(const CsbmConfig& config);

// class_separation * mu_c + N(0, I), with one unit-norm direction mu_c per class.
Matrix gen_gaussian_features(std::span<const std::size_t> labels, std::size_t dim, std::uint64_t seed,
                             double class_separation = 1.0);

// Test accuracy of a one-vs-rest ridge classifier trained on a random half of
// the rows and evaluated on the other half.
double linear_probe_accuracy(const Matrix& features, std::span<const std::size_t> labels,
                             std::uint64_t seed, double ridge = 1e-3);

// Every hyperedge holds edge_size distinct nodes drawn uniformly.
Hypergraph gen_uniform_hypergraph(std::size_t num_nodes, std::size_t num_hyperedges,
                                  std::size_t edge_size, std::uint64_t seed);

struct DiffusionPairConfig {
  std::size_t num_pairs = 1000;
  double sigma_min = 1.0;
  double sigma_max = 10.0;
  DiffusionMode mode = DiffusionMode::kGradientDescent;
  EdgePotentialSpec potential;
  // Unset picks default_pair_eta(mode, potential.kind).
  std::optional<double> eta;
  std::uint64_t seed = 0;

  void validate() const;
  double resolved_eta() const;
  bool operator==(const DiffusionPairConfig&) const = default;
};

// 0.5 for ADMM; for gradient steps 0.5 (CE), 0.02 (TV), 0.1 (LEC), else 0.1.
double default_pair_eta(DiffusionMode mode, EdgePotentialKind kind);

struct DiffusionPair {
  Matrix h0;  // num_nodes x 1
  Matrix h1;
  bool operator==(const DiffusionPair&) const = default;
};

/// For each pair: sigma ~ U[sigma_min, sigma_max], H0 ~ N(0, sigma^2), and H1
/// is one solver step from H = Q = X = H0 with a quadratic node potential.
std::vector<DiffusionPair> gen_diffusion_pairs(const Hypergraph& h, const DiffusionPairConfig& config);

inline constexpr int kPairsFormatVersion = 1;

struct DiffusionPairFile {
  std::string hypergraph_ref;
  DiffusionPairConfig config;
  std::vector<DiffusionPair> pairs;
};

std::string diffusion_pairs_to_json(const DiffusionPairFile& file);
// Throws ParseError with a JSON-path location.
DiffusionPairFile diffusion_pairs_from_json(const std::string& text);

/// Uniform random disjoint train/val/test split. Sizes are round(f * n) for
/// train and val; test takes the rest. Throws ValidationError when the
/// fractions do not sum to 1 or a part ends up empty.
SplitMasks split_dataset(std::size_t num_nodes, std::array<double, 3> fractions, std::uint64_t seed);

}  // namespace hgdiff
