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

#include "hgdiff/hypergraph.hpp"

#include <algorithm>
#include <string>

#include "hgdiff/error.hpp"

namespace hgdiff {

Hypergraph Hypergraph::build(const std::vector<std::vector<std::size_t>>& edges,
                             std::size_t num_nodes) {
  Hypergraph h;
  h.num_nodes_ = num_nodes;
  h.node_degrees_.assign(num_nodes, 0);
  h.edge_offsets_.reserve(edges.size() + 1);
  std::vector<std::size_t> scratch;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].empty())
      throw ValidationError("hyperedge " + std::to_string(e) + " is empty");
    scratch = edges[e];
    for (std::size_t v : scratch) {
      if (v >= num_nodes)
        throw ValidationError("hyperedge " + std::to_string(e) + " references node " +
                              std::to_string(v) + " but num_nodes is " +
                              std::to_string(num_nodes));
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    for (std::size_t v : scratch) ++h.node_degrees_[v];
    h.members_.insert(h.members_.end(), scratch.begin(), scratch.end());
    h.edge_offsets_.push_back(h.members_.size());
  }
  return h;
}

std::vector<std::size_t> Hypergraph::edge_sizes() const {
  std::vector<std::size_t> sizes(num_edges());
  for (std::size_t e = 0; e < sizes.size(); ++e) sizes[e] = edge_size(e);
  return sizes;
}

std::vector<std::vector<std::size_t>> Hypergraph::edge_lists() const {
  std::vector<std::vector<std::size_t>> out(num_edges());
  for (std::size_t e = 0; e < out.size(); ++e) {
    const auto m = edge(e);
    out[e].assign(m.begin(), m.end());
  }
  return out;
}

BipartiteExpansion::BipartiteExpansion(const Hypergraph& h) : num_nodes_(h.num_nodes()) {
  const std::size_t m = h.num_edges();
  pairs_.reserve(h.num_incidences());
  edge_offsets_.resize(m + 1);
  for (std::size_t e = 0; e < m; ++e) {
    edge_offsets_[e] = pairs_.size();
    for (std::size_t v : h.edge(e)) pairs_.push_back({v, e});
  }
  edge_offsets_[m] = pairs_.size();

  // Counting sort by node keeps each node's pairs in ascending edge order.
  node_offsets_.assign(num_nodes_ + 1, 0);
  for (const Pair& p : pairs_) ++node_offsets_[p.node + 1];
  for (std::size_t v = 0; v < num_nodes_; ++v) node_offsets_[v + 1] += node_offsets_[v];
  node_pairs_.resize(pairs_.size());
  std::vector<std::size_t> cursor(node_offsets_.begin(), node_offsets_.end() - 1);
  for (std::size_t p = 0; p < pairs_.size(); ++p) node_pairs_[cursor[pairs_[p].node]++] = p;
}

Hypergraph BipartiteExpansion::reconstruct() const {
  std::vector<std::vector<std::size_t>> edges(num_edges());
  for (const Pair& p : pairs_) edges[p.edge].push_back(p.node);
  return Hypergraph::build(edges, num_nodes_);
}

std::size_t LabeledHypergraph::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return *std::max_element(labels->begin(), labels->end()) + 1;
}

void LabeledHypergraph::validate() const {
  const std::size_t n = hypergraph.num_nodes();
  if (labels && labels->size() != n)
    throw ValidationError("labels length " + std::to_string(labels->size()) +
                          " != num_nodes " + std::to_string(n));
  if (features && features->rows() != n)
    throw ValidationError("feature rows " + std::to_string(features->rows()) +
                          " != num_nodes " + std::to_string(n));
  if (masks) {
    if (masks->train.size() != n || masks->val.size() != n || masks->test.size() != n)
      throw ValidationError("mask length != num_nodes");
    for (std::size_t v = 0; v < n; ++v) {
      const int hits = int(masks->train[v]) + int(masks->val[v]) + int(masks->test[v]);
      if (hits > 1)
        throw ValidationError("node " + std::to_string(v) + " appears in more than one mask");
    }
  }
}

double ce_homophily(const Hypergraph& h, std::span<const std::size_t> labels) {
  const std::size_t n = h.num_nodes();
  if (labels.size() != n) throw ValidationError("labels length != num_nodes");
  const BipartiteExpansion bx(h);
  // stamp[u] == v + 1 marks u as already counted for node v.
  std::vector<std::size_t> stamp(n, 0);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t neighbors = 0, same = 0;
    for (std::size_t p : bx.node_pairs(v)) {
      for (std::size_t u : h.edge(bx.pair(p).edge)) {
        if (u == v || stamp[u] == v + 1) continue;
        stamp[u] = v + 1;
        ++neighbors;
        if (labels[u] == labels[v]) ++same;
      }
    }
    if (neighbors == 0) continue;
    total += static_cast<double>(same) / static_cast<double>(neighbors);
    ++counted;
  }
  if (counted == 0) throw ValidationError("ce_homophily: no node has a clique-expansion neighbor");
  return total / static_cast<double>(counted);
}

Hypergraph permute_nodes(const Hypergraph& h, std::span<const std::size_t> perm) {
  if (perm.size() != h.num_nodes()) throw ValidationError("permutation length != num_nodes");
  auto edges = h.edge_lists();
  for (auto& e : edges)
    for (auto& v : e) v = perm[v];
  return Hypergraph::build(edges, h.num_nodes());
}

}  // namespace hgdiff
