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

#include "hgdiff/synth.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "hgdiff/error.hpp"
#include "hgdiff/rng.hpp"
#include "json_convert.hpp"

namespace hgdiff {

namespace {

constexpr std::uint64_t kTagEdges = 1;
constexpr std::uint64_t kTagMeans = 2;
constexpr std::uint64_t kTagNoise = 3;

}  // namespace

void CsbmConfig::validate() const {
  if (num_classes != 2) throw ValidationError("csbm: only num_classes = 2 is supported");
  if (alpha < 1 || 2 * alpha > edge_size)
    throw ValidationError("csbm: alpha must satisfy 1 <= alpha <= edge_size / 2");
  if (edge_size - alpha > nodes_per_class)
    throw ValidationError("csbm: edge_size - alpha exceeds nodes_per_class");
  if (num_hyperedges < 1) throw ValidationError("csbm: num_hyperedges must be >= 1");
}

LabeledHypergraph gen_csbm(const CsbmConfig& config) {
  config.validate();
  const std::size_t n = config.nodes_per_class;
  Rng rng = Rng(config.seed).fork(kTagEdges);
  std::vector<std::vector<std::size_t>> edges;
  edges.reserve(config.num_hyperedges);
  for (std::size_t e = 0; e < config.num_hyperedges; ++e) {
    std::size_t minority = 1;
    if (config.randomize_minority) minority = rng.bernoulli(0.5) ? 1 : 0;
    const std::size_t majority = 1 - minority;
    std::vector<std::size_t> edge;
    for (std::size_t v : rng.sample_without_replacement(n, config.alpha)) edge.push_back(minority * n + v);
    for (std::size_t v : rng.sample_without_replacement(n, config.edge_size - config.alpha))
      edge.push_back(majority * n + v);
    edges.push_back(std::move(edge));
  }
  LabeledHypergraph d;
  d.hypergraph = Hypergraph::build(edges, 2 * n);
  std::vector<std::size_t> labels(2 * n);
  for (std::size_t v = 0; v < 2 * n; ++v) labels[v] = v / n;
  d.labels = std::move(labels);
  return d;
}

Matrix gen_gaussian_features(std::span<const std::size_t> labels, std::size_t dim, std::uint64_t seed,
                             double class_separation) {
  if (dim < 1) throw ValidationError("gen_gaussian_features: dim must be >= 1");
  std::size_t classes = 0;
  for (std::size_t l : labels) classes = std::max(classes, l + 1);
  Rng mean_rng = Rng(seed).fork(kTagMeans);
  Matrix means(classes, dim);
  for (std::size_t c = 0; c < classes; ++c) {
    auto row = means.row(c);
    double norm = 0.0;
    for (double& v : row) {
      v = mean_rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : row) v /= norm;
  }
  Rng noise = Rng(seed).fork(kTagNoise);
  Matrix X(labels.size(), dim);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto row = X.row(i);
    for (std::size_t j = 0; j < dim; ++j) row[j] = class_separation * means(labels[i], j) + noise.normal();
  }
  return X;
}

double linear_probe_accuracy(const Matrix& features, std::span<const std::size_t> labels,
                             std::uint64_t seed, double ridge) {
  const std::size_t n = features.rows();
  if (labels.size() != n || n < 2) throw ValidationError("linear_probe_accuracy: need >= 2 labeled rows");
  std::size_t classes = 0;
  for (std::size_t l : labels) classes = std::max(classes, l + 1);
  Rng rng(seed);
  const auto perm = rng.permutation(n);
  const std::size_t n_train = n / 2;
  const std::size_t d = features.cols() + 1;

  Eigen::MatrixXd A(n_train, d);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(n_train, classes, -1.0);
  for (std::size_t i = 0; i < n_train; ++i) {
    const std::size_t r = perm[i];
    for (std::size_t j = 0; j + 1 < d; ++j) A(i, j) = features(r, j);
    A(i, d - 1) = 1.0;
    Y(i, labels[r]) = 1.0;
  }
  Eigen::MatrixXd G = A.transpose() * A;
  G.diagonal().array() += ridge;
  const Eigen::MatrixXd W = G.ldlt().solve(A.transpose() * Y);

  std::size_t correct = 0;
  for (std::size_t i = n_train; i < n; ++i) {
    const std::size_t r = perm[i];
    Eigen::RowVectorXd x(d);
    for (std::size_t j = 0; j + 1 < d; ++j) x(j) = features(r, j);
    x(d - 1) = 1.0;
    const Eigen::RowVectorXd score = x * W;
    Eigen::Index best = 0;
    score.maxCoeff(&best);
    if (static_cast<std::size_t>(best) == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n - n_train);
}

Hypergraph gen_uniform_hypergraph(std::size_t num_nodes, std::size_t num_hyperedges,
                                  std::size_t edge_size, std::uint64_t seed) {
  if (edge_size < 1 || edge_size > num_nodes)
    throw ValidationError("gen_uniform_hypergraph: need 1 <= edge_size <= num_nodes");
  Rng rng = Rng(seed).fork(kTagEdges);
  std::vector<std::vector<std::size_t>> edges;
  edges.reserve(num_hyperedges);
  for (std::size_t e = 0; e < num_hyperedges; ++e)
    edges.push_back(rng.sample_without_replacement(num_nodes, edge_size));
  return Hypergraph::build(edges, num_nodes);
}

double default_pair_eta(DiffusionMode mode, EdgePotentialKind kind) {
  if (mode != DiffusionMode::kGradientDescent) return 0.5;
  switch (kind) {
    case EdgePotentialKind::kCliqueExpansion: return 0.5;
    case EdgePotentialKind::kTotalVariation: return 0.02;
    case EdgePotentialKind::kLovaszCardinality: return 0.1;
    default: return 0.1;
  }
}

void DiffusionPairConfig::validate() const {
  if (num_pairs < 1) throw ValidationError("num_pairs must be >= 1");
  if (!(sigma_min > 0.0 && sigma_min <= sigma_max && std::isfinite(sigma_max)))
    throw ValidationError("sigma_range must satisfy 0 < min <= max");
  if (eta && !(*eta > 0.0 && std::isfinite(*eta))) throw ValidationError("eta must be > 0");
  potential.validate();
}

double DiffusionPairConfig::resolved_eta() const {
  return eta ? *eta : default_pair_eta(mode, potential.kind);
}

std::vector<DiffusionPair> gen_diffusion_pairs(const Hypergraph& h, const DiffusionPairConfig& config) {
  config.validate();
  const DiffusionSpecs specs{{NodePotentialKind::kQuadratic}, config.potential};
  const double eta = config.resolved_eta();
  std::vector<DiffusionPair> pairs;
  pairs.reserve(config.num_pairs);
  for (std::size_t i = 0; i < config.num_pairs; ++i) {
    Rng rng(mix_seed(config.seed, i));
    const double sigma = rng.uniform(config.sigma_min, config.sigma_max);
    Matrix h0(h.num_nodes(), 1);
    for (double& v : h0.values()) v = sigma * rng.normal();
    const DiffusionState s0 = initial_state(h, h0);
    DiffusionState s1 = diffusion_step(config.mode, s0, h, specs, eta);
    pairs.push_back({std::move(h0), std::move(s1.H)});
  }
  return pairs;
}

std::string diffusion_pairs_to_json(const DiffusionPairFile& file) {
  using detail::Json;
  Json pairs = Json::array();
  for (const auto& p : file.pairs) {
    pairs.push_back({{"h0", std::vector<double>(p.h0.values().begin(), p.h0.values().end())},
                     {"h1", std::vector<double>(p.h1.values().begin(), p.h1.values().end())}});
  }
  Json doc{{"format_version", kPairsFormatVersion},
           {"hypergraph_ref", file.hypergraph_ref},
           {"config", detail::to_json(file.config)},
           {"pairs", std::move(pairs)}};
  return doc.dump() + "\n";
}

DiffusionPairFile diffusion_pairs_from_json(const std::string& text) {
  using detail::Json;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "invalid JSON");
  }
  if (!doc.is_object()) throw ParseError("/", "expected an object");
  if (!doc.contains("format_version") || doc["format_version"] != kPairsFormatVersion)
    throw ParseError("/format_version", "unsupported or missing pairs format version");
  DiffusionPairFile file;
  try {
    file.hypergraph_ref = doc.at("hypergraph_ref").get<std::string>();
  } catch (const Json::exception&) {
    throw ParseError("/hypergraph_ref", "expected a string");
  }
  try {
    file.config = detail::diffusion_pair_config_from_json(doc.at("config"), "/config");
  } catch (const ConfigError& e) {
    throw ParseError(e.field(), e.what());
  } catch (const Json::exception&) {
    throw ParseError("/config", "missing");
  }
  if (!doc.contains("pairs") || !doc["pairs"].is_array()) throw ParseError("/pairs", "expected an array");
  const auto& list = doc["pairs"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "/pairs/" + std::to_string(i);
    try {
      const auto h0 = list[i].at("h0").get<std::vector<double>>();
      const auto h1 = list[i].at("h1").get<std::vector<double>>();
      if (h0.size() != h1.size()) throw ParseError(at, "h0 and h1 lengths differ");
      file.pairs.push_back({Matrix::column(h0), Matrix::column(h1)});
    } catch (const Json::exception& e) {
      throw ParseError(at, e.what());
    }
  }
  return file;
}

SplitMasks split_dataset(std::size_t num_nodes, std::array<double, 3> fractions, std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ValidationError("split fractions must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("split fractions must sum to 1");
  const auto n = static_cast<double>(num_nodes);
  const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * n));
  const auto n_val = static_cast<std::size_t>(std::llround(fractions[1] * n));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= num_nodes)
    throw ValidationError("split leaves an empty train, val, or test set");
  Rng rng(seed);
  const auto perm = rng.permutation(num_nodes);
  SplitMasks m;
  m.train.assign(num_nodes, false);
  m.val.assign(num_nodes, false);
  m.test.assign(num_nodes, false);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const std::size_t v = perm[i];
    if (i < n_train) m.train[v] = true;
    else if (i < n_train + n_val) m.val[v] = true;
    else m.test[v] = true;
  }
  return m;
}

}  // namespace hgdiff
