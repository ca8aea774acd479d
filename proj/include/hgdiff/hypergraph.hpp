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
#include <vector>

#include "hgdiff/tensor.hpp"

namespace hgdiff {

/// Immutable hypergraph with canonical (sorted, duplicate-free) hyperedges
/// stored in CSR form. Duplicate hyperedges across the edge list are kept.
class Hypergraph {
 public:
  Hypergraph() = default;

  // Canonicalizes each hyperedge and computes degrees.
  // Throws ValidationError on an out-of-range index or an empty hyperedge.
  static Hypergraph build(const std::vector<std::vector<std::size_t>>& edges,
                          std::size_t num_nodes);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edge_offsets_.size() - 1; }
  std::size_t num_incidences() const { return members_.size(); }

  std::span<const std::size_t> edge(std::size_t e) const {
    return {members_.data() + edge_offsets_[e], edge_offsets_[e + 1] - edge_offsets_[e]};
  }
  std::size_t edge_size(std::size_t e) const { return edge_offsets_[e + 1] - edge_offsets_[e]; }
  std::size_t edge_offset(std::size_t e) const { return edge_offsets_[e]; }
  std::size_t degree(std::size_t v) const { return node_degrees_[v]; }
  std::span<const std::size_t> node_degrees() const { return node_degrees_; }
  std::vector<std::size_t> edge_sizes() const;
  std::vector<std::vector<std::size_t>> edge_lists() const;

  // Flat member array; incidence p belongs to the edge whose offset range covers p.
  std::span<const std::size_t> members() const { return members_; }

  bool operator==(const Hypergraph&) const = default;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> edge_offsets_{0};
  std::vector<std::size_t> members_;
  std::vector<std::size_t> node_degrees_;
};

/// Star expansion: the bipartite node/hyperedge incidence graph, traversable
/// from either side. Pairs are ordered edge-major (edge 0's members first),
/// so pair index p coincides with Hypergraph::members() index p.
class BipartiteExpansion {
 public:
  struct Pair {
    std::size_t node;
    std::size_t edge;
    bool operator==(const Pair&) const = default;
  };

  explicit BipartiteExpansion(const Hypergraph& h);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edge_offsets_.size() - 1; }
  std::size_t num_pairs() const { return pairs_.size(); }

  std::span<const Pair> pairs() const { return pairs_; }
  const Pair& pair(std::size_t p) const { return pairs_[p]; }

  // Pair indices [begin, end) for the members of edge e.
  std::size_t edge_begin(std::size_t e) const { return edge_offsets_[e]; }
  std::size_t edge_end(std::size_t e) const { return edge_offsets_[e + 1]; }
  std::size_t edge_size(std::size_t e) const { return edge_offsets_[e + 1] - edge_offsets_[e]; }

  // Pair indices incident to node v, in ascending edge order.
  std::span<const std::size_t> node_pairs(std::size_t v) const {
    return {node_pairs_.data() + node_offsets_[v], node_offsets_[v + 1] - node_offsets_[v]};
  }
  std::size_t degree(std::size_t v) const { return node_offsets_[v + 1] - node_offsets_[v]; }

  Hypergraph reconstruct() const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Pair> pairs_;
  std::vector<std::size_t> edge_offsets_;
  std::vector<std::size_t> node_offsets_;
  std::vector<std::size_t> node_pairs_;
};

struct SplitMasks {
  std::vector<bool> train;
  std::vector<bool> val;
  std::vector<bool> test;

  bool operator==(const SplitMasks&) const = default;
};

/// Hypergraph plus optional node labels, features, and split masks.
struct LabeledHypergraph {
  Hypergraph hypergraph;
  std::optional<std::vector<std::size_t>> labels;
  std::optional<Matrix> features;
  std::optional<SplitMasks> masks;

  std::size_t num_classes() const;
  // Throws ValidationError when label/feature/mask shapes disagree with the
  // hypergraph or the masks overlap.
  void validate() const;

  bool operator==(const LabeledHypergraph&) const = default;
};

/// Node-mean homophily on the clique expansion: for every node with at least
/// one co-member, the fraction of its distinct co-members sharing its label.
/// Throws ValidationError when no node has a neighbor.
double ce_homophily(const Hypergraph& h, std::span<const std::size_t> labels);

// Relabels nodes: node v becomes perm[v]. Hyperedge order is preserved.
Hypergraph permute_nodes(const Hypergraph& h, std::span<const std::size_t> perm);

}  // namespace hgdiff
