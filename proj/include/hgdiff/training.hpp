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
#include <span>
#include <string>
#include <vector>

#include "hgdiff/edhnn.hpp"
#include "hgdiff/hypergraph.hpp"
#include "hgdiff/nn.hpp"
#include "hgdiff/synth.hpp"

namespace hgdiff {

struct ClassificationOptions {
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
  AdamOptions adam;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  double loss = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

struct ClassificationResult {
  std::vector<EpochMetrics> history;
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
  // Test accuracy at the epoch with the highest validation accuracy (first on ties).
  double test_acc = 0.0;
  std::size_t parameter_count = 0;
  EdHnnModel best_model;
};

/// Full-batch training with softmax cross-entropy on the train mask and Adam.
/// config.input_dim and config.output_dim must match the features and label
/// count. Throws ValidationError when labels, features, or masks are missing
/// or a mask is empty.
ClassificationResult train_node_classification(const LabeledHypergraph& data, const EdHnnConfig& config,
                                               const ClassificationOptions& options);

// Accuracy of argmax rows over the masked nodes.
double masked_accuracy(const Matrix& logits, std::span<const std::size_t> labels,
                       const std::vector<bool>& mask);

// CSV with header `epoch,train_acc,val_acc,test_acc,loss`.
std::string metrics_csv(std::span<const EpochMetrics> history);

struct RegressionOptions {
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double train_fraction = 0.8;
  // Divide inputs and targets by the RMS of the training inputs.
  bool standardize = true;
  // Cosine-anneal the learning rate from adam.lr to zero over the run.
  bool cosine_lr = true;
  std::uint64_t seed = 0;
  AdamOptions adam;
};

struct RegressionResult {
  double heldout_mae = 0.0;
  // MAE of predicting H1 = H0 on the same held-out pairs.
  double identity_mae = 0.0;
  double train_mae = 0.0;
  std::vector<double> epoch_loss;
  std::size_t num_train = 0;
  std::size_t num_heldout = 0;
  std::size_t parameter_count = 0;
  double scale = 1.0;
  EdHnnModel model;
};

/// Fits a single-iteration model mapping H0 to H1 under mean absolute error.
/// The config must have num_iterations = 1, input_dim = 1, no encoder, and
/// no classifier head. Throws ValidationError with fewer than 2 pairs.
RegressionResult train_diffusion_regression(const Hypergraph& h, std::span<const DiffusionPair> pairs,
                                            const EdHnnConfig& config, const RegressionOptions& options);

}  // namespace hgdiff
