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

#include "hgdiff/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hgdiff/diffusion.hpp"
#include "hgdiff/error.hpp"

namespace hgdiff {

namespace {

constexpr std::uint64_t kTagInit = 1;
constexpr std::uint64_t kTagDropout = 2;
constexpr std::uint64_t kTagSplit = 3;
constexpr std::uint64_t kTagShuffle = 4;

bool any(const std::vector<bool>& mask) { return std::find(mask.begin(), mask.end(), true) != mask.end(); }

double mean_abs_diff(const Matrix& a, const Matrix& b, double scale_a) {
  double s = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += std::abs(av[i] * scale_a - bv[i]);
  return s / static_cast<double>(av.size());
}

Matrix scaled(const Matrix& m, double inv) {
  Matrix out = m;
  for (double& v : out.values()) v *= inv;
  return out;
}

}  // namespace

double masked_accuracy(const Matrix& logits, std::span<const std::size_t> labels,
                       const std::vector<bool>& mask) {
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    const auto row = logits.row(i);
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    ++total;
    if (best == labels[i]) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

ClassificationResult train_node_classification(const LabeledHypergraph& data, const EdHnnConfig& config,
                                               const ClassificationOptions& options) {
  if (!data.labels || !data.features || !data.masks)
    throw ValidationError("classification needs labels, features, and split masks");
  data.validate();
  const auto& masks = *data.masks;
  if (!any(masks.train) || !any(masks.val) || !any(masks.test))
    throw ValidationError("classification needs non-empty train, val, and test masks");
  if (config.input_dim != data.features->cols())
    throw ValidationError("config input_dim " + std::to_string(config.input_dim) + " != feature width " +
                          std::to_string(data.features->cols()));
  if (config.classifier_layers == 0 || config.output_dim != data.num_classes())
    throw ValidationError("config needs a classifier head with output_dim = " +
                          std::to_string(data.num_classes()));

  const Hypergraph& h = data.hypergraph;
  const auto& labels = *data.labels;
  const Matrix& X = *data.features;
  Rng init_rng = Rng(options.seed).fork(kTagInit);
  Rng dropout_rng = Rng(options.seed).fork(kTagDropout);
  EdHnnModel model(config, init_rng);
  Adam adam(options.adam);

  ClassificationResult result;
  result.parameter_count = model.parameter_count();
  result.best_model = model;
  bool have_best = false;
  EdHnnCache cache;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const Matrix logits = model.forward(h, X, &cache, {true, &dropout_rng});
    const LossResult loss = cross_entropy_loss(logits, labels, masks.train);
    EdHnnGrads grads = model.zero_grads();
    model.backward(h, cache, loss.grad, grads);
    adam.step(model.parameter_pointers(), EdHnnModel::gradient_pointers(grads));

    const Matrix eval = model.forward(h, X, nullptr, {});
    if (!eval.all_finite()) throw NumericError("training diverged at epoch " + std::to_string(epoch));
    EpochMetrics m{epoch, masked_accuracy(eval, labels, masks.train), masked_accuracy(eval, labels, masks.val),
                   masked_accuracy(eval, labels, masks.test), loss.loss};
    if (!have_best || m.val_acc > result.best_val_acc) {
      have_best = true;
      result.best_epoch = epoch;
      result.best_val_acc = m.val_acc;
      result.test_acc = m.test_acc;
      result.best_model = model;
    }
    result.history.push_back(m);
  }
  return result;
}

std::string metrics_csv(std::span<const EpochMetrics> history) {
  std::string out = "epoch,train_acc,val_acc,test_acc,loss\n";
  for (const auto& m : history) {
    out += std::to_string(m.epoch) + "," + format_real(m.train_acc) + "," + format_real(m.val_acc) + "," +
           format_real(m.test_acc) + "," + format_real(m.loss) + "\n";
  }
  return out;
}

RegressionResult train_diffusion_regression(const Hypergraph& h, std::span<const DiffusionPair> pairs,
                                            const EdHnnConfig& config, const RegressionOptions& options) {
  if (pairs.size() < 2) throw ValidationError("regression needs at least 2 pairs");
  if (config.num_iterations != 1) throw ValidationError("regression uses a single-iteration model");
  if (config.input_dim != 1 || config.encoder_layers != 0 || config.classifier_layers != 0)
    throw ValidationError("regression needs input_dim = 1, encoder_layers = 0, classifier_layers = 0");
  if (options.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].h0.rows() != h.num_nodes() || pairs[i].h1.rows() != h.num_nodes() ||
        pairs[i].h0.cols() != 1 || pairs[i].h1.cols() != 1)
      throw ValidationError("pair " + std::to_string(i) + " does not match the hypergraph");
  }

  Rng split_rng = Rng(options.seed).fork(kTagSplit);
  const auto order = split_rng.permutation(pairs.size());
  auto n_train = static_cast<std::size_t>(std::llround(options.train_fraction * static_cast<double>(pairs.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, pairs.size() - 1);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<std::size_t> heldout(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  double scale = 1.0;
  if (options.standardize) {
    double ss = 0.0;
    std::size_t count = 0;
    for (std::size_t i : train)
      for (double v : pairs[i].h0.values()) {
        ss += v * v;
        ++count;
      }
    scale = std::sqrt(ss / static_cast<double>(count));
    if (!(scale > 0.0)) scale = 1.0;
  }
  const double inv = 1.0 / scale;

  Rng init_rng = Rng(options.seed).fork(kTagInit);
  Rng dropout_rng = Rng(options.seed).fork(kTagDropout);
  Rng shuffle_rng = Rng(options.seed).fork(kTagShuffle);
  EdHnnModel model(config, init_rng);
  Adam adam(options.adam);

  RegressionResult result;
  result.num_train = train.size();
  result.num_heldout = heldout.size();
  result.parameter_count = model.parameter_count();
  result.scale = scale;

  std::vector<Matrix> inputs(pairs.size()), targets(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    inputs[i] = scaled(pairs[i].h0, inv);
    targets[i] = scaled(pairs[i].h1, inv);
  }

  EdHnnCache cache;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    if (options.cosine_lr)
      adam.set_lr(0.5 * options.adam.lr *
                  (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch) / static_cast<double>(options.epochs))));
    const auto perm = shuffle_rng.permutation(train.size());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < perm.size(); start += options.batch_size) {
      const std::size_t stop = std::min(perm.size(), start + options.batch_size);
      EdHnnGrads grads = model.zero_grads();
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = train[perm[k]];
        const Matrix pred = model.forward(h, inputs[i], &cache, {true, &dropout_rng});
        const LossResult loss = mean_absolute_error(pred, targets[i]);
        model.backward(h, cache, loss.grad, grads);
        epoch_loss += loss.loss;
      }
      grads.scale(1.0 / static_cast<double>(stop - start));
      adam.step(model.parameter_pointers(), EdHnnModel::gradient_pointers(grads));
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(train.size()));
  }

  auto evaluate = [&](const std::vector<std::size_t>& which) {
    double s = 0.0;
    for (std::size_t i : which) s += mean_abs_diff(model.forward(h, inputs[i], nullptr), pairs[i].h1, scale);
    return s / static_cast<double>(which.size());
  };
  result.heldout_mae = evaluate(heldout);
  result.train_mae = evaluate(train);
  double id = 0.0;
  for (std::size_t i : heldout) id += mean_abs_diff(pairs[i].h0, pairs[i].h1, 1.0);
  result.identity_mae = id / static_cast<double>(heldout.size());
  if (!std::isfinite(result.heldout_mae)) throw NumericError("regression produced a non-finite error");
  result.model = std::move(model);
  return result;
}

}  // namespace hgdiff
