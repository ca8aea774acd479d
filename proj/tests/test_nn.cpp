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
#include <vector>

#include "hgdiff/error.hpp"
#include "hgdiff/nn.hpp"
#include "hgdiff/rng.hpp"
#include "test_util.hpp"

namespace hgdiff {
namespace {

using testing::normal_matrix;

TEST(Activations, ReluAndLayerNorm) {
  const Matrix r = relu(Matrix::from_rows({{-1.0, 2.0}}));
  EXPECT_EQ(r, Matrix::from_rows({{0.0, 2.0}}));
  const Matrix ln = layer_norm(Matrix::from_rows({{3.0, 3.0, 3.0}}));
  for (double v : ln.values()) EXPECT_EQ(v, 0.0);
  const Matrix z = layer_norm(Matrix::from_rows({{1.0, 3.0}}));
  EXPECT_NEAR(z(0, 0), -1.0 / std::sqrt(1.0 + kLayerNormEps), 1e-15);
  EXPECT_NEAR(z(0, 1), 1.0 / std::sqrt(1.0 + kLayerNormEps), 1e-15);
}

TEST(Mlp, ZeroLayersIsIdentity) {
  Rng rng(1);
  const Mlp id({3, 8, 3, 0, true}, rng);
  const Matrix x = normal_matrix(rng, 4, 3);
  EXPECT_EQ(id.forward(x, nullptr), x);
  EXPECT_EQ(id.parameter_count(), 0u);
  EXPECT_THROW(Mlp({3, 8, 2, 0, true}, rng), ValidationError);
}

TEST(Mlp, LinearLayerGradient) {
  Rng rng(2);
  Mlp lin({3, 0, 2, 1, false}, rng);
  const Matrix x = normal_matrix(rng, 1, 3);
  MlpCache cache;
  const Matrix y = lin.forward(x, &cache);
  std::vector<Matrix> grads = lin.zero_grads();
  lin.backward(cache, y, grads);
  const Matrix& dw = grads[lin.weight_index(0)];
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(dw(i, j), x(0, i) * y(0, j), 1e-14);
  const Matrix& db = grads[lin.bias_index(0)];
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(db(0, j), y(0, j), 1e-14);
}

TEST(Mlp, ZeroOutputGradientGivesZeroGrads) {
  Rng rng(3);
  const Mlp mlp({4, 6, 2, 3, true}, rng);
  const Matrix x = normal_matrix(rng, 5, 4);
  MlpCache cache;
  mlp.forward(x, &cache);
  std::vector<Matrix> grads = mlp.zero_grads();
  const Matrix dx = mlp.backward(cache, Matrix(5, 2), grads);
  for (const auto& g : grads)
    for (double v : g.values()) EXPECT_EQ(v, 0.0);
  for (double v : dx.values()) EXPECT_EQ(v, 0.0);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  Rng rng(4);
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t in = 1 + rng.uniform_index(5), hidden = 2 + rng.uniform_index(5),
                      out = 1 + rng.uniform_index(4), layers = 1 + rng.uniform_index(3);
    const bool norm = trial % 2 == 0;
    Mlp mlp({in, hidden, out, layers, norm}, rng);
    for (auto& p : mlp.mutable_params())
      for (double& v : p.values()) v += 0.1 * rng.normal();
    const std::size_t rows = 1 + rng.uniform_index(6);
    EXPECT_LE(testing::mlp_gradcheck(mlp, normal_matrix(rng, rows, in), normal_matrix(rng, rows, out)), 1e-4)
        << "in=" << in << " hidden=" << hidden << " out=" << out << " layers=" << layers << " norm=" << norm;
  }
}

TEST(Mlp, StaleCacheIsRejected) {
  Rng rng(5);
  Mlp mlp({2, 4, 1, 2, true}, rng);
  const Matrix x = normal_matrix(rng, 3, 2);
  MlpCache cache;
  mlp.forward(x, &cache);
  mlp.mutable_params()[0](0, 0) += 1.0;
  std::vector<Matrix> grads = mlp.zero_grads();
  EXPECT_THROW(mlp.backward(cache, Matrix(3, 1, 1.0), grads), Error);
  EXPECT_THROW(mlp.forward(normal_matrix(rng, 3, 5), nullptr), ValidationError);
}

TEST(Mlp, DropoutIsIdentityInEvalAndUnbiasedInTrain) {
  Rng rng(6);
  const Mlp mlp({1, 1, 1, 2, false}, rng);
  const Matrix x(20000, 1, 1.0);
  ForwardOptions eval{false, 0.5, nullptr};
  EXPECT_EQ(mlp.forward(x, nullptr, eval), mlp.forward(x, nullptr));

  // With a single positive hidden unit the output is affine in the dropped
  // activation, so its mean matches the no-dropout output.
  Mlp pass({1, 1, 1, 2, false}, rng);
  auto& p = pass.mutable_params();
  p[pass.weight_index(0)](0, 0) = 1.0;
  p[pass.bias_index(0)](0, 0) = 0.0;
  p[pass.weight_index(1)](0, 0) = 1.0;
  p[pass.bias_index(1)](0, 0) = 0.0;
  Rng drop(7);
  const Matrix y = pass.forward(x, nullptr, {true, 0.3, &drop});
  double mean = 0.0;
  for (double v : y.values()) mean += v;
  mean /= static_cast<double>(y.size());
  EXPECT_NEAR(mean, 1.0, 0.02);
  for (double v : y.values()) EXPECT_TRUE(v == 0.0 || std::abs(v - 1.0 / 0.7) < 1e-12);
}

TEST(Mlp, ForwardIsDeterministicPerSeed) {
  Rng a(8), b(8);
  const Mlp ma({3, 5, 2, 2, true}, a), mb({3, 5, 2, 2, true}, b);
  const Matrix x = normal_matrix(a, 4, 3);
  Rng da(9), db(9);
  EXPECT_EQ(ma.forward(x, nullptr, {true, 0.4, &da}), mb.forward(x, nullptr, {true, 0.4, &db}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam;
  Matrix theta(1, 1, 0.0);
  const Matrix g(1, 1, 1.0);
  Matrix* params[] = {&theta};
  const Matrix* grads[] = {&g};
  adam.step(params, grads);
  EXPECT_NEAR(theta(0, 0), -0.001, 1e-11);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Adam adam;
  Matrix theta(2, 2, 0.7);
  const Matrix g(2, 2, 0.0);
  Matrix* params[] = {&theta};
  const Matrix* grads[] = {&g};
  for (int i = 0; i < 5; ++i) adam.step(params, grads);
  EXPECT_EQ(theta, Matrix(2, 2, 0.7));
}

TEST(Adam, RunsAreReproducible) {
  auto run = [] {
    Rng rng(10);
    Mlp mlp({3, 4, 1, 2, true}, rng);
    Adam adam;
    const Matrix x = normal_matrix(rng, 6, 3), w = normal_matrix(rng, 6, 1);
    for (int step = 0; step < 100; ++step) {
      MlpCache cache;
      mlp.forward(x, &cache);
      std::vector<Matrix> grads = mlp.zero_grads();
      mlp.backward(cache, w, grads);
      std::vector<Matrix*> ps;
      std::vector<const Matrix*> gs;
      for (auto& p : mlp.mutable_params()) ps.push_back(&p);
      for (auto& g : grads) gs.push_back(&g);
      adam.step(ps, gs);
    }
    return mlp.params();
  };
  EXPECT_EQ(run(), run());
}

TEST(Loss, CrossEntropy) {
  const std::vector<std::size_t> labels = {0, 1};
  const LossResult even = cross_entropy_loss(Matrix::from_rows({{0.0, 0.0}, {5.0, 1.0}}), labels, {true, false});
  EXPECT_NEAR(even.loss, std::log(2.0), 1e-15);
  EXPECT_EQ(even.grad(1, 0), 0.0);
  EXPECT_EQ(even.grad(1, 1), 0.0);
  const LossResult sure = cross_entropy_loss(Matrix::from_rows({{60.0, 0.0}}), std::vector<std::size_t>{0}, {true});
  EXPECT_LT(sure.loss, 1e-20);
  Rng rng(11);
  const Matrix logits = normal_matrix(rng, 5, 3);
  const LossResult r = cross_entropy_loss(logits, std::vector<std::size_t>{0, 2, 1, 1, 0}, {true, true, false, true, true});
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.grad(i, 0) + r.grad(i, 1) + r.grad(i, 2), 0.0, 1e-15);
  EXPECT_THROW(cross_entropy_loss(logits, std::vector<std::size_t>(5, 0), std::vector<bool>(5, false)),
               ValidationError);
}

TEST(Loss, MeanAbsoluteError) {
  const LossResult r = mean_absolute_error(Matrix::from_rows({{1.0}, {2.0}, {3.0}}), Matrix::from_rows({{0.0}, {2.0}, {5.0}}));
  EXPECT_DOUBLE_EQ(r.loss, 1.0);
  EXPECT_DOUBLE_EQ(r.grad(0, 0), 1.0 / 3.0);
  EXPECT_EQ(r.grad(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(r.grad(2, 0), -1.0 / 3.0);
}

TEST(Checkpoint, RoundTripsExactly) {
  Rng rng(12);
  std::vector<NamedTensor> tensors = {{"a", normal_matrix(rng, 2, 3)}, {"b", normal_matrix(rng, 1, 1)}};
  tensors[0].value(0, 0) = 0.1 + 0.2;
  EXPECT_EQ(tensors_from_json(tensors_to_json(tensors)), tensors);
  EXPECT_THROW(tensors_from_json(R"({"format_version": 1, "tensors": [{"name": "a", "rows": 2, "cols": 2, "values": [1]}]})"),
               ParseError);
}

}  // namespace
}  // namespace hgdiff
