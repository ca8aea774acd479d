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

#include <filesystem>
#include <set>
#include <vector>

#include "hgdiff/dataset_io.hpp"
#include "hgdiff/error.hpp"
#include "hgdiff/hypergraph.hpp"
#include "hgdiff/rng.hpp"
#include "hgdiff/synth.hpp"
#include "test_util.hpp"

namespace hgdiff {
namespace {

using Edges = std::vector<std::vector<std::size_t>>;

// Clique-expansion homophily recomputed from scratch with std::set.
double homophily_oracle(const Edges& edges, std::size_t n, const std::vector<std::size_t>& labels) {
  std::vector<std::set<std::size_t>> nbrs(n);
  for (const auto& e : edges)
    for (std::size_t u : e)
      for (std::size_t v : e)
        if (u != v) nbrs[u].insert(v);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (nbrs[v].empty()) continue;
    std::size_t same = 0;
    for (std::size_t u : nbrs[v]) same += labels[u] == labels[v];
    total += static_cast<double>(same) / static_cast<double>(nbrs[v].size());
    ++counted;
  }
  return total / static_cast<double>(counted);
}

TEST(Hypergraph, CountsDegreesAndSizes) {
  const Hypergraph h = Hypergraph::build({{0, 1, 2}, {1, 2}}, 3);
  EXPECT_EQ(h.num_edges(), 2u);
  EXPECT_EQ(h.num_incidences(), 5u);
  EXPECT_EQ(std::vector<std::size_t>(h.node_degrees().begin(), h.node_degrees().end()),
            (std::vector<std::size_t>{1, 2, 2}));
  EXPECT_EQ(h.edge_sizes(), (std::vector<std::size_t>{3, 2}));
}

TEST(Hypergraph, CanonicalizesEdges) {
  const Hypergraph h = Hypergraph::build({{2, 0, 1, 1}}, 3);
  EXPECT_EQ(h.edge_lists(), (Edges{{0, 1, 2}}));
  EXPECT_EQ(h.edge_size(0), 3u);
}

TEST(Hypergraph, KeepsDuplicateEdgesAndSingletons) {
  const Hypergraph h = Hypergraph::build({{0, 1}, {1, 0}, {2}}, 3);
  EXPECT_EQ(h.edge_lists(), (Edges{{0, 1}, {0, 1}, {2}}));
  EXPECT_EQ(h.degree(2), 1u);
}

TEST(Hypergraph, RejectsBadInput) {
  EXPECT_THROW(Hypergraph::build({{0, 3}}, 3), ValidationError);
  EXPECT_THROW(Hypergraph::build({{}}, 3), ValidationError);
}

TEST(Hypergraph, DegreeSumMatchesIncidencesAtPaperScale) {
  Rng rng(5);
  Edges edges;
  for (int e = 0; e < 1000; ++e) edges.push_back(rng.sample_without_replacement(5000, 15));
  const Hypergraph h = Hypergraph::build(edges, 5000);
  std::size_t sum = 0;
  for (std::size_t d : h.node_degrees()) sum += d;
  EXPECT_EQ(sum, 15000u);
  EXPECT_EQ(h.num_incidences(), 15000u);
}

TEST(BipartiteExpansion, EnumeratesPairsEdgeMajor) {
  const BipartiteExpansion x(Hypergraph::build({{0, 1}}, 2));
  ASSERT_EQ(x.num_pairs(), 2u);
  EXPECT_EQ(x.pair(0), (BipartiteExpansion::Pair{0, 0}));
  EXPECT_EQ(x.pair(1), (BipartiteExpansion::Pair{1, 0}));
}

TEST(BipartiteExpansion, NodeSideIncidences) {
  const Hypergraph h = Hypergraph::build({{0, 1, 2}, {1, 2}}, 3);
  const BipartiteExpansion x(h);
  EXPECT_EQ(x.num_pairs(), 5u);
  std::vector<std::size_t> edges_of_1;
  for (std::size_t p : x.node_pairs(1)) edges_of_1.push_back(x.pair(p).edge);
  EXPECT_EQ(edges_of_1, (std::vector<std::size_t>{0, 1}));
  for (std::size_t p = 0; p < x.num_pairs(); ++p) EXPECT_EQ(x.pair(p).node, h.members()[p]);
}

TEST(BipartiteExpansion, RoundTripsRandomHypergraphs) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(20);
    Edges edges;
    const std::size_t m = 1 + rng.uniform_index(15);
    for (std::size_t e = 0; e < m; ++e) edges.push_back(rng.sample_without_replacement(n, 1 + rng.uniform_index(n)));
    const Hypergraph h = Hypergraph::build(edges, n);
    const BipartiteExpansion x(h);
    EXPECT_EQ(x.reconstruct(), h);
    std::size_t degree_sum = 0;
    for (std::size_t v = 0; v < n; ++v) degree_sum += x.degree(v);
    EXPECT_EQ(degree_sum, x.num_pairs());
  }
}

TEST(CeHomophily, ExtremeCases) {
  EXPECT_DOUBLE_EQ(ce_homophily(Hypergraph::build({{0, 1, 2}}, 3), std::vector<std::size_t>{0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(ce_homophily(Hypergraph::build({{0, 1}}, 2), std::vector<std::size_t>{0, 1}), 0.0);
}

TEST(CeHomophily, SkipsIsolatedNodes) {
  const Hypergraph h = Hypergraph::build({{0, 1}, {2}}, 4);
  EXPECT_DOUBLE_EQ(ce_homophily(h, std::vector<std::size_t>{0, 0, 1, 1}), 1.0);
  EXPECT_THROW(ce_homophily(Hypergraph::build({{0}}, 1), std::vector<std::size_t>{0}), ValidationError);
}

TEST(CeHomophily, MatchesSetOracleAndSymmetries) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(30);
    Edges edges;
    for (std::size_t e = 0; e < 1 + rng.uniform_index(12); ++e)
      edges.push_back(rng.sample_without_replacement(n, 2 + rng.uniform_index(3)));
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = rng.uniform_index(3);
    const Hypergraph h = Hypergraph::build(edges, n);
    const double score = ce_homophily(h, labels);
    EXPECT_NEAR(score, homophily_oracle(edges, n, labels), 1e-12);

    std::vector<std::size_t> swapped(labels);
    for (auto& l : swapped) l = (l + 1) % 3;
    EXPECT_NEAR(ce_homophily(h, swapped), score, 1e-12);

    const auto perm = rng.permutation(n);
    std::vector<std::size_t> moved(n);
    for (std::size_t v = 0; v < n; ++v) moved[perm[v]] = labels[v];
    EXPECT_NEAR(ce_homophily(permute_nodes(h, perm), moved), score, 1e-12);
  }
}

TEST(DatasetIo, RoundTripsEveryField) {
  Rng rng(3);
  LabeledHypergraph d;
  d.hypergraph = Hypergraph::build({{3, 1, 0}, {2, 4}, {4}}, 6);
  d.labels = std::vector<std::size_t>{0, 1, 1, 0, 2, 2};
  d.features = testing::normal_matrix(rng, 6, 3);
  d.masks = split_dataset(6, {0.5, 0.25, 0.25}, 1);
  const auto dir = testing::scratch_dir("dataset_io");
  save_dataset(d, dir / "d.json");
  EXPECT_EQ(load_dataset(dir / "d.json"), d);
  EXPECT_EQ(dataset_from_json(dataset_to_json(d)), d);
}

TEST(DatasetIo, MissingFeaturesStayAbsent) {
  LabeledHypergraph d;
  d.hypergraph = Hypergraph::build({{0, 1}}, 2);
  const LabeledHypergraph back = dataset_from_json(dataset_to_json(d));
  EXPECT_FALSE(back.features.has_value());
  EXPECT_FALSE(back.labels.has_value());
  EXPECT_FALSE(back.masks.has_value());
}

TEST(DatasetIo, NamesOffendingHyperedge) {
  const std::string text =
      R"({"num_nodes": 3, "hyperedges": [[0, 1], [1, 7]], "labels": null, "features": null, "masks": null, "format_version": 1})";
  try {
    dataset_from_json(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(e.location().find("hyperedges/1"), std::string::npos) << e.what();
  }
}

TEST(DatasetIo, RejectsMalformedDocuments) {
  EXPECT_THROW(dataset_from_json("{"), ParseError);
  EXPECT_THROW(dataset_from_json(R"({"num_nodes": 2, "hyperedges": [[0]], "format_version": 2})"), ParseError);
  EXPECT_THROW(load_dataset("/nonexistent/hgdiff.json"), Error);
}

}  // namespace
}  // namespace hgdiff
