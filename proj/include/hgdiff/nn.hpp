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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hgdiff/rng.hpp"
#include "hgdiff/tensor.hpp"

namespace hgdiff {

inline constexpr double kLayerNormEps = 1e-5;

// Elementwise max(x, 0).
Matrix relu(const Matrix& x);

// Row-wise (x - mean) / sqrt(var + eps) with biased variance.
Matrix layer_norm(const Matrix& x, double eps = kLayerNormEps);

struct MlpSpec {
  std::size_t in_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t out_dim = 0;
  // 0 means the identity map (requires in_dim == out_dim).
  std::size_t layers = 1;
  bool layer_norm = true;

  bool operator==(const MlpSpec&) const = default;
};

struct ForwardOptions {
  bool train = false;
  double dropout = 0.0;
  Rng* rng = nullptr;  // required when train && dropout > 0
};

class Mlp;

/// Activations kept by Mlp::forward for the matching backward pass.
struct MlpCache {
  struct Layer {
    Matrix input;
    Matrix xhat;                  // layer-norm output before scale/shift
    std::vector<double> inv_std;  // per row
    Matrix activation;            // pre-ReLU value
    Matrix dropout_scale;         // 0 or 1/(1-rate) per entry; empty when unused
  };
  std::vector<Layer> layers;
  std::uint64_t owner = 0;
  std::uint64_t generation = 0;
};

/// Multi-layer perceptron. Hidden layers: affine -> LayerNorm -> ReLU ->
/// dropout. The last layer is affine only.
///
/// Parameters live in one flat list: for each layer the weight (in x out) and
/// bias (1 x out), followed by LayerNorm scale and shift (1 x out) on hidden
/// layers when enabled. Any mutable access to the list invalidates caches.
class Mlp {
 public:
  Mlp() = default;
  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero, LayerNorm
  // scale one and shift zero.
  Mlp(const MlpSpec& spec, Rng& rng);

  const MlpSpec& spec() const { return spec_; }
  std::size_t in_dim() const { return spec_.in_dim; }
  std::size_t out_dim() const { return spec_.out_dim; }

  const std::vector<Matrix>& params() const { return params_; }
  std::vector<Matrix>& mutable_params() {
    ++generation_;
    return params_;
  }
  std::size_t parameter_count() const;
  // Zero-filled gradient buffers with the parameter shapes.
  std::vector<Matrix> zero_grads() const;

  // Index of layer l's weight / bias in params().
  std::size_t weight_index(std::size_t layer) const { return layer_offsets_[layer]; }
  std::size_t bias_index(std::size_t layer) const { return layer_offsets_[layer] + 1; }

  // Throws ValidationError naming `where` on an input width mismatch.
  Matrix forward(const Matrix& x, MlpCache* cache, const ForwardOptions& options = {},
                 const std::string& where = "mlp") const;

  // Accumulates parameter gradients into `grads` and returns d(input).
  // Throws Error if the cache came from another network or older parameters.
  Matrix backward(const MlpCache& cache, const Matrix& grad_out, std::vector<Matrix>& grads) const;

 private:
  bool has_norm(std::size_t layer) const { return spec_.layer_norm && layer + 1 < spec_.layers; }

  MlpSpec spec_;
  std::vector<Matrix> params_;
  std::vector<std::size_t> layer_offsets_;
  std::uint64_t id_ = 0;
  std::uint64_t generation_ = 0;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Adam with bias correction. Weight decay is added to the gradient (L2).
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);
  std::size_t steps() const { return t_; }
  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }

 private:
  AdamOptions options_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::size_t t_ = 0;
};

struct LossResult {
  double loss = 0.0;
  Matrix grad;
};

// Mean softmax cross-entropy over rows with mask[r] set. Gradient rows
// outside the mask are zero. Throws ValidationError on an empty mask.
LossResult cross_entropy_loss(const Matrix& logits, std::span<const std::size_t> labels,
                              const std::vector<bool>& mask);

// Mean |pred - target| over all entries; gradient uses sign(0) = 0.
LossResult mean_absolute_error(const Matrix& pred, const Matrix& target);

struct NamedTensor {
  std::string name;
  Matrix value;
  bool operator==(const NamedTensor&) const = default;
};

inline constexpr int kCheckpointFormatVersion = 1;

// {"format_version": 1, "tensors": [{"name", "rows", "cols", "values"}]}.
// Doubles are written with round-trip precision so reload is exact.
std::string tensors_to_json(std::span<const NamedTensor> tensors);
std::vector<NamedTensor> tensors_from_json(const std::string& text);

}  // namespace hgdiff
