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
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hgdiff/hypergraph.hpp"
#include "hgdiff/nn.hpp"
#include "hgdiff/rng.hpp"
#include "hgdiff/tensor.hpp"

namespace hgdiff {

enum class ModelVariant {
  kEdHnn,
  // Node-to-edge messages also see the previous layer's incidence message.
  kEdHnnII,
  // Edge-to-node message ignores the receiving node: rho(m_e).
  kInvariantBaseline,
};

std::string to_string(ModelVariant variant);
// Accepts "ed_hnn", "ed_hnn_ii", "invariant_baseline".
ModelVariant model_variant_from_string(const std::string& name);

/// Shapes and hyperparameters of an equivariant diffusion network.
///
/// Width bookkeeping, with D the node width:
///   D     = encoder_layers > 0 ? hidden_dim : input_dim
///   phi   : D (plus the message width for ed_hnn_ii) -> message width
///   rho   : [h_v ; m_e] (just m_e for the baseline) -> edge-to-node width
///   update: [h_v ; sum of edge messages ; x_v ; d_v] -> D
/// A 0-layer MLP is the identity, so the widths on either side collapse.
struct EdHnnConfig {
  ModelVariant variant = ModelVariant::kEdHnn;
  std::size_t num_iterations = 2;
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 64;
  std::size_t encoder_layers = 1;
  std::size_t phi_layers = 2;
  std::size_t rho_layers = 2;
  std::size_t update_layers = 2;
  // 0 disables the head; the output is then H^(L) itself.
  std::size_t classifier_layers = 2;
  std::size_t classifier_hidden = 64;
  std::size_t output_dim = 2;
  double input_dropout = 0.2;
  double dropout = 0.3;
  bool layer_norm = true;

  // Throws ValidationError on an inconsistent combination.
  void validate() const;

  std::size_t node_dim() const { return encoder_layers > 0 ? hidden_dim : input_dim; }
  std::size_t message_dim() const { return phi_layers > 0 ? hidden_dim : node_dim(); }
  std::size_t rho_input_dim() const;
  std::size_t rho_output_dim() const { return rho_layers > 0 ? hidden_dim : rho_input_dim(); }
  // With update_layers == 0 the update is h' = aggregate, which needs the
  // edge-to-node width to equal D.
  std::size_t update_input_dim() const {
    return update_layers > 0 ? 2 * node_dim() + rho_output_dim() + 1 : rho_output_dim();
  }
  std::size_t num_outputs() const { return classifier_layers > 0 ? output_dim : node_dim(); }

  bool operator==(const EdHnnConfig&) const = default;
};

enum class ModelPart { kEncoder, kPhi, kRho, kUpdate, kClassifier };

std::string to_string(ModelPart part);

/// Gradient buffers mirroring EdHnnModel's parameters.
struct EdHnnGrads {
  std::vector<std::vector<Matrix>> parts;  // indexed by ModelPart
  Matrix initial_message;                  // ed_hnn_ii only

  void scale(double factor);
  void add(const EdHnnGrads& other);
};

/// Everything a backward pass needs from one forward pass.
struct EdHnnCache {
  struct Iteration {
    MlpCache phi;
    MlpCache rho;
    MlpCache update;
  };
  Matrix input_dropout_scale;
  MlpCache encoder;
  std::vector<Iteration> iterations;
  MlpCache classifier;
  bool external_initial_state = false;
  bool valid = false;
};

struct EdHnnForwardOptions {
  bool train = false;
  Rng* rng = nullptr;  // required in train mode when any dropout rate is nonzero
  // Starting node state H^(0) (num_nodes x node width). Unset means the
  // encoded X, which is also the anchor x_v either way.
  const Matrix* initial_state = nullptr;
};

/// ED-HNN family with parameters shared across all iterations.
///
/// Member sums inside a hyperedge are taken in sorted order per channel, so
/// outputs do not depend on how members are stored or on node labels.
class EdHnnModel {
 public:
  EdHnnModel() = default;
  EdHnnModel(const EdHnnConfig& config, Rng& rng);

  const EdHnnConfig& config() const { return config_; }

  const Mlp& part(ModelPart p) const { return mlps_[static_cast<std::size_t>(p)]; }
  Mlp& mutable_part(ModelPart p) { return mlps_[static_cast<std::size_t>(p)]; }
  const Matrix& initial_message() const { return initial_message_; }
  Matrix& mutable_initial_message() { return initial_message_; }

  std::size_t parameter_count() const;
  EdHnnGrads zero_grads() const;

  // Flat views in a fixed order, for the optimizer and checkpoints.
  std::vector<Matrix*> parameter_pointers();
  static std::vector<const Matrix*> gradient_pointers(const EdHnnGrads& grads);

  // Node representations after the last iteration (before the head).
  // Throws ValidationError naming the failing step on a shape mismatch.
  Matrix encode(const Hypergraph& h, const Matrix& X, EdHnnCache* cache,
                const EdHnnForwardOptions& options = {}) const;
  // encode() followed by the classifier head when present.
  Matrix forward(const Hypergraph& h, const Matrix& X, EdHnnCache* cache,
                 const EdHnnForwardOptions& options = {}) const;
  // Accumulates parameter gradients for a forward() output gradient and
  // returns d(X).
  Matrix backward(const Hypergraph& h, const EdHnnCache& cache, const Matrix& grad_out,
                  EdHnnGrads& grads) const;

  std::vector<NamedTensor> named_tensors() const;
  // Throws ParseError when names or shapes do not match this model.
  void load_tensors(std::span<const NamedTensor> tensors);

 private:
  EdHnnConfig config_;
  std::vector<Mlp> mlps_;
  Matrix initial_message_;
};

/// Caller-supplied maps for one V -> E -> V step on a single channel group.
struct MessageFunctions {
  std::function<std::vector<double>(std::span<const double> h_u)> phi;
  std::function<std::vector<double>(std::span<const double> h_v, std::span<const double> m_e)> rho;
  std::function<std::vector<double>(std::span<const double> h_v, std::span<const double> agg,
                                    std::span<const double> x_v, double degree)>
      update;
};

// Steps 1-3 on one hyperedge: returns m_{e->v} for each member, in order.
std::vector<std::vector<double>> edge_messages(const MessageFunctions& fns,
                                               const std::vector<std::vector<double>>& members);

// One full step on every node. Rows of H and X are node features.
Matrix message_passing_step(const Hypergraph& h, const Matrix& H, const Matrix& X,
                            const MessageFunctions& fns);

// phi(h) = (h, 1), rho(h, (S, n)) = 4 (n h - S), update h - eta (2 (h - x) + agg):
// one gradient step on the clique-expansion potential with a quadratic anchor.
MessageFunctions clique_expansion_functions(double eta);

// A single-iteration, single-channel model whose weights implement the
// clique-expansion gradient step exactly on hypergraphs with all hyperedges
// of size edge_size (the count n enters rho as a constant weight).
EdHnnModel clique_expansion_model(double eta, std::size_t edge_size);

}  // namespace hgdiff
