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

#include "hgdiff/diffusion.hpp"
#include "hgdiff/edhnn.hpp"
#include "hgdiff/error.hpp"
#include "hgdiff/potentials.hpp"
#include "hgdiff/rng.hpp"
#include "hgdiff/synth.hpp"
#include "test_util.hpp"

namespace hgdiff {
namespace {

using testing::normal_matrix;

const ModelVariant kVariants[] = {ModelVariant::kEdHnn, ModelVariant::kEdHnnII, ModelVariant::kInvariantBaseline};

EdHnnConfig small_config(ModelVariant variant) {
  EdHnnConfig c;
  c.variant = variant;
  c.num_iterations = 2;
  c.input_dim = 3;
  c.hidden_dim = 5;
  c.classifier_hidden = 4;
  c.output_dim = 2;
  c.input_dropout = 0.0;
  c.dropout = 0.0;
  return c;
}

Hypergraph five_nodes() { return Hypergraph::build({{0, 1, 2}, {1, 3}, {2, 3, 4}, {0, 4}, {4}}, 5); }

void jitter(EdHnnModel& m, Rng& rng) {
  for (Matrix* p : m.parameter_pointers())
    for (double& v : p->values()) v += 0.1 * rng.normal();
  if (!m.initial_message().empty())
    for (double& v : m.mutable_initial_message().values()) v = rng.normal();
}

TEST(EdHnnConfig, WidthsAndValidation) {
  EdHnnConfig c = small_config(ModelVariant::kEdHnn);
  EXPECT_EQ(c.node_dim(), 5u);
  EXPECT_EQ(c.rho_input_dim(), 10u);
  EXPECT_EQ(c.update_input_dim(), 2 * 5 + 5 + 1u);
  c.variant = ModelVariant::kInvariantBaseline;
  EXPECT_EQ(c.rho_input_dim(), 5u);
  c.variant = ModelVariant::kEdHnnII;
  c.phi_layers = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_EQ(model_variant_from_string("ed_hnn_ii"), ModelVariant::kEdHnnII);
  EXPECT_THROW(model_variant_from_string("allset"), Error);
}

TEST(CliqueExpansionConstruction, MessagesEqualPotentialGradient) {
  Rng rng(1);
  const auto fns = clique_expansion_functions(0.1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(10);
    const auto h = testing::normal_vector(rng, n);
    std::vector<std::vector<double>> members;
    for (double v : h) members.push_back({v});
    const auto msgs = edge_messages(fns, members);
    const auto g = edge_potential_grad(EdgePotentialSpec::clique_expansion(), h);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(msgs[i][0], g[i], 1e-9 * std::max(1.0, std::abs(g[i])));
  }
}

TEST(CliqueExpansionConstruction, StepEqualsGradientDescent) {
  Rng rng(2);
  const Hypergraph h = gen_uniform_hypergraph(30, 25, 4, 2);
  const Matrix H = normal_matrix(rng, 30, 1), X = normal_matrix(rng, 30, 1);
  DiffusionState s = initial_state(h, X);
  s.H = H;
  const DiffusionSpecs specs{{}, EdgePotentialSpec::clique_expansion()};
  const Matrix expected = gd_step(s, h, specs, 0.05).H;
  EXPECT_LE(max_abs_diff(message_passing_step(h, H, X, clique_expansion_functions(0.05)), expected), 1e-9);
}

TEST(CliqueExpansionConstruction, HandWeightedModelOnTwoNodes) {
  const Hypergraph h = Hypergraph::build({{0, 1}}, 2);
  const Matrix H = Matrix::from_rows({{1.0}, {0.0}});
  const Matrix X = Matrix::from_rows({{0.0}, {0.0}});
  const EdHnnModel model = clique_expansion_model(0.1, 2);
  const Matrix out = model.forward(h, X, nullptr, {false, nullptr, &H});
  EXPECT_NEAR(out(0, 0), 0.4, 1e-15);
  EXPECT_NEAR(out(1, 0), 0.4, 1e-15);
}

TEST(CliqueExpansionConstruction, HandWeightedModelOnUniformHypergraph) {
  Rng rng(3);
  const Hypergraph h = gen_uniform_hypergraph(40, 30, 3, 3);
  const Matrix H = normal_matrix(rng, 40, 1), X = normal_matrix(rng, 40, 1);
  DiffusionState s = initial_state(h, X);
  s.H = H;
  const Matrix expected = gd_step(s, h, {{}, EdgePotentialSpec::clique_expansion()}, 0.02).H;
  const Matrix out = clique_expansion_model(0.02, 3).forward(h, X, nullptr, {false, nullptr, &H});
  EXPECT_LE(max_abs_diff(out, expected), 1e-12);
}

TEST(EdHnnModel, ParameterCountIsConstantInDepth) {
  for (ModelVariant v : kVariants) {
    std::size_t first = 0;
    for (std::size_t L : {1, 2, 4, 8}) {
      EdHnnConfig c = small_config(v);
      c.num_iterations = L;
      Rng rng(4);
      const std::size_t count = EdHnnModel(c, rng).parameter_count();
      if (L == 1) first = count;
      EXPECT_EQ(count, first) << to_string(v) << " L=" << L;
    }
  }
}

TEST(EdHnnModel, BaselineDiffersOnlyInRhoInputWidth) {
  Rng a(5), b(5);
  const EdHnnModel ed(small_config(ModelVariant::kEdHnn), a);
  const EdHnnModel base(small_config(ModelVariant::kInvariantBaseline), b);
  const std::size_t D = ed.config().node_dim(), hidden = ed.config().hidden_dim;
  EXPECT_EQ(ed.parameter_count() - base.parameter_count(), D * hidden);
  for (ModelPart p : {ModelPart::kEncoder, ModelPart::kPhi, ModelPart::kUpdate, ModelPart::kClassifier})
    EXPECT_EQ(ed.part(p).parameter_count(), base.part(p).parameter_count());
}

TEST(EdHnnModel, RelabelingPermutesOutputsBitwise) {
  Rng rng(6);
  for (ModelVariant v : kVariants) {
    for (int trial = 0; trial < 5; ++trial) {
      EdHnnModel model(small_config(v), rng);
      jitter(model, rng);
      const Hypergraph h = gen_uniform_hypergraph(12, 9, 2 + rng.uniform_index(4), rng.next_u64());
      const Matrix X = normal_matrix(rng, 12, 3);
      const auto perm = rng.permutation(12);
      const Matrix out = model.forward(h, X, nullptr);
      const Matrix pout = model.forward(permute_nodes(h, perm), testing::permute_rows(X, perm), nullptr);
      EXPECT_EQ(testing::permute_rows(out, perm), pout) << to_string(v);
    }
  }
}

TEST(EdHnnModel, MemberStorageOrderDoesNotMatter) {
  // Reversing the node order flips the stored order of every hyperedge
  // after canonical re-sorting; the sorted per-channel sums must hide it.
  Rng rng(7);
  for (ModelVariant v : kVariants) {
    EdHnnModel model(small_config(v), rng);
    jitter(model, rng);
    const Hypergraph h = five_nodes();
    const Matrix X = normal_matrix(rng, 5, 3);
    const std::vector<std::size_t> rev = {4, 3, 2, 1, 0};
    const Matrix out = model.forward(h, X, nullptr);
    EXPECT_EQ(testing::permute_rows(out, rev), model.forward(permute_nodes(h, rev), testing::permute_rows(X, rev), nullptr));
  }
}

TEST(EdHnnModel, SilentMessagesMakeDepthIrrelevant) {
  Rng rng(8);
  EdHnnConfig c = small_config(ModelVariant::kEdHnn);
  c.update_layers = 1;
  EdHnnModel model(c, rng);
  Mlp& rho = model.mutable_part(ModelPart::kRho);
  const std::size_t last = rho.spec().layers - 1;
  rho.mutable_params()[rho.weight_index(last)].fill(0.0);
  rho.mutable_params()[rho.bias_index(last)].fill(0.0);
  Mlp& update = model.mutable_part(ModelPart::kUpdate);
  Matrix& w = update.mutable_params()[update.weight_index(0)];
  w.fill(0.0);
  for (std::size_t i = 0; i < c.node_dim(); ++i) w(i, i) = 1.0;
  update.mutable_params()[update.bias_index(0)].fill(0.0);

  const Hypergraph h = five_nodes();
  const Matrix X = normal_matrix(rng, 5, 3);
  const Matrix two = model.forward(h, X, nullptr);
  c.num_iterations = 1;
  EdHnnModel shallow(c, rng);
  shallow.load_tensors(model.named_tensors());
  EXPECT_EQ(shallow.forward(h, X, nullptr), two);
}

TEST(EdHnnModel, SecondOrderVariantReducesToFirstOrder) {
  Rng rng(9);
  for (bool norm : {false, true}) {
    EdHnnConfig c = small_config(ModelVariant::kEdHnn);
    c.layer_norm = norm;
    EdHnnModel ed(c, rng);
    jitter(ed, rng);
    c.variant = ModelVariant::kEdHnnII;
    EdHnnModel two(c, rng);
    for (ModelPart p : {ModelPart::kEncoder, ModelPart::kRho, ModelPart::kUpdate, ModelPart::kClassifier})
      two.mutable_part(p).mutable_params() = ed.part(p).params();
    auto& dst = two.mutable_part(ModelPart::kPhi).mutable_params();
    const auto& src = ed.part(ModelPart::kPhi).params();
    const std::size_t Dm = c.message_dim();
    for (std::size_t t = 0; t < src.size(); ++t) {
      if (t != 0) {
        dst[t] = src[t];
        continue;
      }
      dst[0].fill(0.0);
      for (std::size_t i = 0; i < src[0].rows(); ++i)
        for (std::size_t j = 0; j < src[0].cols(); ++j) dst[0](Dm + i, j) = src[0](i, j);
    }
    for (double& v : two.mutable_initial_message().values()) v = rng.normal();
    const Hypergraph h = five_nodes();
    const Matrix X = normal_matrix(rng, 5, 3);
    EXPECT_EQ(two.forward(h, X, nullptr), ed.forward(h, X, nullptr)) << "layer_norm=" << norm;
  }
}

TEST(EdHnnModel, EqualMembersGetEqualMessagesOnlyBaselineIsConstant) {
  Rng rng(10);
  for (ModelVariant v : {ModelVariant::kEdHnn, ModelVariant::kInvariantBaseline}) {
    EdHnnConfig c = small_config(v);
    c.encoder_layers = 0;
    c.input_dim = 2;
    EdHnnModel model(c, rng);
    const Mlp& phi = model.part(ModelPart::kPhi);
    const Mlp& rho = model.part(ModelPart::kRho);
    auto messages = [&](const Matrix& H) {
      const Matrix m = phi.forward(H, nullptr);
      Matrix me(1, m.cols());
      for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t k = 0; k < m.cols(); ++k) me(0, k) += m(r, k);
      if (v == ModelVariant::kInvariantBaseline) {
        const Matrix out = rho.forward(me, nullptr);
        Matrix all(H.rows(), out.cols());
        for (std::size_t r = 0; r < H.rows(); ++r) std::copy(out.row(0).begin(), out.row(0).end(), all.row(r).begin());
        return all;
      }
      Matrix in(H.rows(), H.cols() + me.cols());
      for (std::size_t r = 0; r < H.rows(); ++r) {
        std::copy(H.row(r).begin(), H.row(r).end(), in.row(r).begin());
        std::copy(me.row(0).begin(), me.row(0).end(), in.row(r).begin() + static_cast<std::ptrdiff_t>(H.cols()));
      }
      return rho.forward(in, nullptr);
    };
    const Matrix same = messages(Matrix::from_rows({{0.3, -0.2}, {0.3, -0.2}, {0.3, -0.2}}));
    EXPECT_EQ(same.row(0)[0], same.row(1)[0]);
    EXPECT_EQ(same.row(1)[0], same.row(2)[0]);
    const Matrix mixed = messages(Matrix::from_rows({{1.0, -0.5}, {0.0, 0.7}, {-1.2, 0.1}}));
    double spread = 0.0;
    for (std::size_t k = 0; k < mixed.cols(); ++k) spread = std::max(spread, std::abs(mixed(0, k) - mixed(1, k)));
    if (v == ModelVariant::kEdHnn) EXPECT_GT(spread, 1e-6);
    else EXPECT_EQ(spread, 0.0);
  }
}

TEST(EdHnnModel, BackwardMatchesFiniteDifferences) {
  Rng rng(11);
  for (int trial = 0; trial < 21; ++trial) {
    EdHnnConfig c = small_config(kVariants[trial % 3]);
    c.num_iterations = 1 + rng.uniform_index(3);
    c.hidden_dim = 2 + rng.uniform_index(4);
    c.classifier_hidden = 3;
    c.layer_norm = rng.bernoulli(0.5);
    c.phi_layers = 1 + rng.uniform_index(2);
    c.rho_layers = rng.uniform_index(3);
    c.update_layers = 1 + rng.uniform_index(2);
    c.encoder_layers = 1;
    EdHnnModel model(c, rng);
    jitter(model, rng);
    const Hypergraph h = five_nodes();
    EXPECT_LE(testing::model_gradcheck(model, h, normal_matrix(rng, 5, 3), normal_matrix(rng, 5, c.num_outputs())),
              1e-4)
        << to_string(c.variant) << " L=" << c.num_iterations << " ln=" << c.layer_norm;
  }
}

TEST(EdHnnModel, ShapeErrorsNameTheStep) {
  Rng rng(12);
  const EdHnnModel model(small_config(ModelVariant::kEdHnn), rng);
  try {
    model.forward(five_nodes(), Matrix(5, 4), nullptr);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("input_dim"), std::string::npos) << e.what();
  }
  EXPECT_THROW(model.forward(five_nodes(), Matrix(4, 3), nullptr), ValidationError);
}

TEST(EdHnnModel, TensorsRoundTrip) {
  Rng rng(13);
  for (ModelVariant v : kVariants) {
    EdHnnModel a(small_config(v), rng);
    jitter(a, rng);
    EdHnnModel b(small_config(v), rng);
    b.load_tensors(a.named_tensors());
    const Matrix X = normal_matrix(rng, 5, 3);
    EXPECT_EQ(a.forward(five_nodes(), X, nullptr), b.forward(five_nodes(), X, nullptr));
    auto bad = a.named_tensors();
    bad[0].value = Matrix(1, 1);
    EXPECT_THROW(b.load_tensors(bad), ParseError);
  }
}

TEST(EdHnnModel, TrainModeIsSeedDeterministic) {
  Rng rng(14);
  EdHnnConfig c = small_config(ModelVariant::kEdHnn);
  c.dropout = 0.3;
  c.input_dropout = 0.2;
  const EdHnnModel model(c, rng);
  const Matrix X = normal_matrix(rng, 5, 3);
  Rng d1(15), d2(15);
  EXPECT_EQ(model.forward(five_nodes(), X, nullptr, {true, &d1}), model.forward(five_nodes(), X, nullptr, {true, &d2}));
  EXPECT_THROW(model.forward(five_nodes(), X, nullptr, {true, nullptr}), ValidationError);
}

}  // namespace
}  // namespace hgdiff
