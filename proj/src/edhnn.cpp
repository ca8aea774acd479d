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

#include "hgdiff/edhnn.hpp"

#include <algorithm>
#include <array>

#include "hgdiff/error.hpp"

namespace hgdiff {

namespace {

constexpr std::array<ModelPart, 5> kParts = {ModelPart::kEncoder, ModelPart::kPhi, ModelPart::kRho,
                                             ModelPart::kUpdate, ModelPart::kClassifier};

std::size_t idx(ModelPart p) { return static_cast<std::size_t>(p); }

// Sum of each channel over a hyperedge's rows, adding in ascending value order.
void sorted_row_sum(const Matrix& rows, std::span<const std::size_t> which, std::span<double> out,
                    std::vector<double>& scratch) {
  scratch.resize(which.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t i = 0; i < which.size(); ++i) scratch[i] = rows(which[i], c);
    std::sort(scratch.begin(), scratch.end());
    double s = 0.0;
    for (double v : scratch) s += v;
    out[c] = s;
  }
}

void add_row(std::span<double> dst, std::span<const double> src) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
}

void copy_into(std::span<double> dst, std::size_t offset, std::span<const double> src) {
  std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(offset));
}

}  // namespace

std::string to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kEdHnn: return "ed_hnn";
    case ModelVariant::kEdHnnII: return "ed_hnn_ii";
    case ModelVariant::kInvariantBaseline: return "invariant_baseline";
  }
  return "unknown";
}

ModelVariant model_variant_from_string(const std::string& name) {
  if (name == "ed_hnn") return ModelVariant::kEdHnn;
  if (name == "ed_hnn_ii") return ModelVariant::kEdHnnII;
  if (name == "invariant_baseline") return ModelVariant::kInvariantBaseline;
  throw ValidationError("unknown model variant '" + name + "'");
}

std::string to_string(ModelPart part) {
  switch (part) {
    case ModelPart::kEncoder: return "encoder";
    case ModelPart::kPhi: return "phi";
    case ModelPart::kRho: return "rho";
    case ModelPart::kUpdate: return "update";
    case ModelPart::kClassifier: return "classifier";
  }
  return "unknown";
}

std::size_t EdHnnConfig::rho_input_dim() const {
  return variant == ModelVariant::kInvariantBaseline ? message_dim() : node_dim() + message_dim();
}

void EdHnnConfig::validate() const {
  if (num_iterations < 1) throw ValidationError("num_iterations must be >= 1");
  if (input_dim < 1) throw ValidationError("input_dim must be >= 1");
  const bool any_hidden = encoder_layers + phi_layers + rho_layers + update_layers > 0;
  if (any_hidden && hidden_dim < 1) throw ValidationError("hidden_dim must be >= 1");
  if (variant == ModelVariant::kEdHnnII && phi_layers == 0)
    throw ValidationError("ed_hnn_ii needs phi_layers >= 1");
  if (update_layers == 0 && rho_output_dim() != node_dim())
    throw ValidationError("update_layers = 0 needs the edge-to-node width (" +
                          std::to_string(rho_output_dim()) + ") to equal the node width (" +
                          std::to_string(node_dim()) + ")");
  if (classifier_layers > 0) {
    if (output_dim < 1) throw ValidationError("output_dim must be >= 1");
    if (classifier_layers > 1 && classifier_hidden < 1)
      throw ValidationError("classifier_hidden must be >= 1");
  }
  if (!(input_dropout >= 0.0 && input_dropout < 1.0)) throw ValidationError("input_dropout must be in [0, 1)");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must be in [0, 1)");
}

void EdHnnGrads::scale(double factor) {
  for (auto& part : parts)
    for (auto& m : part)
      for (double& v : m.values()) v *= factor;
  for (double& v : initial_message.values()) v *= factor;
}

void EdHnnGrads::add(const EdHnnGrads& other) {
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = 0; j < parts[i].size(); ++j) {
      auto dst = parts[i][j].values();
      const auto src = other.parts[i][j].values();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  auto dst = initial_message.values();
  const auto src = other.initial_message.values();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
}

EdHnnModel::EdHnnModel(const EdHnnConfig& config, Rng& rng) : config_(config) {
  config.validate();
  const std::size_t D = config.node_dim();
  const std::size_t Dm = config.message_dim();
  const bool ln = config.layer_norm;
  std::array<MlpSpec, 5> specs;
  specs[idx(ModelPart::kEncoder)] = {config.input_dim, config.hidden_dim,
                                     config.encoder_layers > 0 ? config.hidden_dim : config.input_dim,
                                     config.encoder_layers, ln};
  const std::size_t phi_in = config.variant == ModelVariant::kEdHnnII ? Dm + D : D;
  specs[idx(ModelPart::kPhi)] = {phi_in, config.hidden_dim, Dm, config.phi_layers, ln};
  specs[idx(ModelPart::kRho)] = {config.rho_input_dim(), config.hidden_dim, config.rho_output_dim(),
                                 config.rho_layers, ln};
  specs[idx(ModelPart::kUpdate)] = {config.update_input_dim(), config.hidden_dim, D,
                                    config.update_layers, ln};
  specs[idx(ModelPart::kClassifier)] = {D, config.classifier_hidden, config.num_outputs(),
                                        config.classifier_layers, ln};
  for (ModelPart p : kParts) {
    Rng sub = rng.fork(0x4d4c50 + idx(p));
    mlps_.emplace_back(specs[idx(p)], sub);
  }
  if (config.variant == ModelVariant::kEdHnnII) initial_message_ = Matrix(1, Dm, 0.0);
}

std::size_t EdHnnModel::parameter_count() const {
  std::size_t n = initial_message_.size();
  for (const auto& m : mlps_) n += m.parameter_count();
  return n;
}

EdHnnGrads EdHnnModel::zero_grads() const {
  EdHnnGrads g;
  for (const auto& m : mlps_) g.parts.push_back(m.zero_grads());
  g.initial_message = Matrix(initial_message_.rows(), initial_message_.cols(), 0.0);
  return g;
}

std::vector<Matrix*> EdHnnModel::parameter_pointers() {
  std::vector<Matrix*> out;
  for (auto& m : mlps_)
    for (auto& p : m.mutable_params()) out.push_back(&p);
  if (!initial_message_.empty()) out.push_back(&initial_message_);
  return out;
}

std::vector<const Matrix*> EdHnnModel::gradient_pointers(const EdHnnGrads& grads) {
  std::vector<const Matrix*> out;
  for (const auto& part : grads.parts)
    for (const auto& g : part) out.push_back(&g);
  if (!grads.initial_message.empty()) out.push_back(&grads.initial_message);
  return out;
}

Matrix EdHnnModel::encode(const Hypergraph& h, const Matrix& X, EdHnnCache* cache,
                          const EdHnnForwardOptions& options) const {
  if (mlps_.empty()) throw ValidationError("model is not initialized");
  const std::size_t N = h.num_nodes();
  const std::size_t E = h.num_edges();
  const std::size_t P = h.num_incidences();
  if (X.rows() != N)
    throw ValidationError("input: feature rows " + std::to_string(X.rows()) + " != num_nodes " +
                          std::to_string(N));
  if (X.cols() != config_.input_dim)
    throw ValidationError("input: feature width " + std::to_string(X.cols()) + " != input_dim " +
                          std::to_string(config_.input_dim));
  const bool train = options.train;
  if (train && options.rng == nullptr && (config_.input_dropout > 0.0 || config_.dropout > 0.0))
    throw ValidationError("train mode with dropout needs an rng");
  const ForwardOptions inner{train, config_.dropout, options.rng};

  const std::size_t D = config_.node_dim();
  const std::size_t Dm = config_.message_dim();
  const std::size_t Dr = config_.rho_output_dim();
  const bool second = config_.variant == ModelVariant::kEdHnnII;
  const bool invariant = config_.variant == ModelVariant::kInvariantBaseline;
  const auto members = h.members();

  std::vector<std::size_t> incidence_edge(P);
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t p = h.edge_offset(e); p < h.edge_offset(e) + h.edge_size(e); ++p) incidence_edge[p] = e;

  if (cache) {
    cache->valid = false;
    cache->iterations.assign(config_.num_iterations, {});
    cache->input_dropout_scale = Matrix();
  }

  Matrix Xd = X;
  if (train && config_.input_dropout > 0.0) {
    const double keep = 1.0 - config_.input_dropout;
    Matrix scale(X.rows(), X.cols());
    auto sv = scale.values();
    auto xv = Xd.values();
    for (std::size_t i = 0; i < xv.size(); ++i) {
      sv[i] = options.rng->uniform() < keep ? 1.0 / keep : 0.0;
      xv[i] *= sv[i];
    }
    if (cache) cache->input_dropout_scale = std::move(scale);
  }
  const Matrix X0 = part(ModelPart::kEncoder)
                        .forward(Xd, cache ? &cache->encoder : nullptr, inner, "encoder");

  Matrix H = X0;
  if (options.initial_state) {
    if (options.initial_state->rows() != N || options.initial_state->cols() != D)
      throw ValidationError("input: initial state must be " + std::to_string(N) + " x " + std::to_string(D));
    H = *options.initial_state;
  }
  if (cache) cache->external_initial_state = options.initial_state != nullptr;
  Matrix prev_incidence;
  if (second) {
    prev_incidence = Matrix(P, Dm);
    for (std::size_t p = 0; p < P; ++p) copy_into(prev_incidence.row(p), 0, initial_message_.row(0));
  }
  std::vector<double> scratch;

  for (std::size_t t = 0; t < config_.num_iterations; ++t) {
    EdHnnCache::Iteration* it = cache ? &cache->iterations[t] : nullptr;

    // 1. node-to-edge messages
    Matrix msg;
    if (second) {
      Matrix in(P, Dm + D);
      for (std::size_t p = 0; p < P; ++p) {
        copy_into(in.row(p), 0, prev_incidence.row(p));
        copy_into(in.row(p), Dm, H.row(members[p]));
      }
      msg = part(ModelPart::kPhi).forward(in, it ? &it->phi : nullptr, inner, "phi");
    } else {
      msg = part(ModelPart::kPhi).forward(H, it ? &it->phi : nullptr, inner, "phi");
    }

    // 2. per-hyperedge sums
    Matrix m_e(E, Dm);
    std::vector<std::size_t> rows;
    for (std::size_t e = 0; e < E; ++e) {
      const std::size_t begin = h.edge_offset(e);
      rows.resize(h.edge_size(e));
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = second ? begin + i : members[begin + i];
      sorted_row_sum(msg, rows, m_e.row(e), scratch);
    }

    // 3. edge-to-node messages, summed per receiving node in edge order
    Matrix agg(N, Dr, 0.0);
    if (invariant) {
      const Matrix out = part(ModelPart::kRho).forward(m_e, it ? &it->rho : nullptr, inner, "rho");
      for (std::size_t p = 0; p < P; ++p) add_row(agg.row(members[p]), out.row(incidence_edge[p]));
    } else {
      Matrix in(P, D + Dm);
      for (std::size_t p = 0; p < P; ++p) {
        copy_into(in.row(p), 0, H.row(members[p]));
        copy_into(in.row(p), D, m_e.row(incidence_edge[p]));
      }
      const Matrix out = part(ModelPart::kRho).forward(in, it ? &it->rho : nullptr, inner, "rho");
      for (std::size_t p = 0; p < P; ++p) add_row(agg.row(members[p]), out.row(p));
    }

    // 4. node update
    if (config_.update_layers == 0) {
      H = part(ModelPart::kUpdate).forward(agg, it ? &it->update : nullptr, inner, "update");
    } else {
      Matrix in(N, 2 * D + Dr + 1);
      for (std::size_t v = 0; v < N; ++v) {
        auto row = in.row(v);
        copy_into(row, 0, H.row(v));
        copy_into(row, D, agg.row(v));
        copy_into(row, D + Dr, X0.row(v));
        row[2 * D + Dr] = static_cast<double>(h.degree(v));
      }
      H = part(ModelPart::kUpdate).forward(in, it ? &it->update : nullptr, inner, "update");
    }
    if (second) prev_incidence = std::move(msg);
  }
  if (cache) cache->valid = true;
  return H;
}

Matrix EdHnnModel::forward(const Hypergraph& h, const Matrix& X, EdHnnCache* cache,
                           const EdHnnForwardOptions& options) const {
  const Matrix H = encode(h, X, cache, options);
  const ForwardOptions inner{options.train, config_.dropout, options.rng};
  return part(ModelPart::kClassifier)
      .forward(H, cache ? &cache->classifier : nullptr, inner, "classifier");
}

Matrix EdHnnModel::backward(const Hypergraph& h, const EdHnnCache& cache, const Matrix& grad_out,
                            EdHnnGrads& grads) const {
  if (!cache.valid || cache.iterations.size() != config_.num_iterations)
    throw Error("model backward: cache does not come from a complete forward pass");
  if (grads.parts.size() != mlps_.size()) throw ValidationError("model backward: gradient layout mismatch");
  const std::size_t N = h.num_nodes();
  const std::size_t E = h.num_edges();
  const std::size_t P = h.num_incidences();
  const std::size_t D = config_.node_dim();
  const std::size_t Dm = config_.message_dim();
  const std::size_t Dr = config_.rho_output_dim();
  const bool second = config_.variant == ModelVariant::kEdHnnII;
  const bool invariant = config_.variant == ModelVariant::kInvariantBaseline;
  const auto members = h.members();
  std::vector<std::size_t> incidence_edge(P);
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t p = h.edge_offset(e); p < h.edge_offset(e) + h.edge_size(e); ++p) incidence_edge[p] = e;

  Matrix dH = part(ModelPart::kClassifier)
                  .backward(cache.classifier, grad_out, grads.parts[idx(ModelPart::kClassifier)]);
  Matrix dX0(N, D, 0.0);
  Matrix d_prev_incidence;  // gradient flowing into the previous iteration's incidence messages

  for (std::size_t t = config_.num_iterations; t-- > 0;) {
    const auto& it = cache.iterations[t];
    Matrix dH_in(N, D, 0.0);

    // 4. node update
    const Matrix d_uin =
        part(ModelPart::kUpdate).backward(it.update, dH, grads.parts[idx(ModelPart::kUpdate)]);
    Matrix d_agg(N, Dr);
    if (config_.update_layers == 0) {
      d_agg = d_uin;
    } else {
      for (std::size_t v = 0; v < N; ++v) {
        const auto row = d_uin.row(v);
        for (std::size_t j = 0; j < D; ++j) {
          dH_in(v, j) += row[j];
          dX0(v, j) += row[D + Dr + j];
        }
        for (std::size_t j = 0; j < Dr; ++j) d_agg(v, j) = row[D + j];
      }
    }

    // 3. edge-to-node messages
    Matrix d_me(E, Dm, 0.0);
    if (invariant) {
      Matrix d_out(E, Dr, 0.0);
      for (std::size_t p = 0; p < P; ++p) add_row(d_out.row(incidence_edge[p]), d_agg.row(members[p]));
      d_me = part(ModelPart::kRho).backward(it.rho, d_out, grads.parts[idx(ModelPart::kRho)]);
    } else {
      Matrix d_out(P, Dr);
      for (std::size_t p = 0; p < P; ++p) copy_into(d_out.row(p), 0, d_agg.row(members[p]));
      const Matrix d_in = part(ModelPart::kRho).backward(it.rho, d_out, grads.parts[idx(ModelPart::kRho)]);
      for (std::size_t p = 0; p < P; ++p) {
        const auto row = d_in.row(p);
        add_row(dH_in.row(members[p]), row.subspan(0, D));
        add_row(d_me.row(incidence_edge[p]), row.subspan(D, Dm));
      }
    }

    // 2 and 1. sums and node-to-edge messages
    if (second) {
      Matrix d_msg(P, Dm);
      for (std::size_t p = 0; p < P; ++p) copy_into(d_msg.row(p), 0, d_me.row(incidence_edge[p]));
      if (!d_prev_incidence.empty()) {
        auto dst = d_msg.values();
        const auto src = d_prev_incidence.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      }
      const Matrix d_in = part(ModelPart::kPhi).backward(it.phi, d_msg, grads.parts[idx(ModelPart::kPhi)]);
      d_prev_incidence = Matrix(P, Dm);
      for (std::size_t p = 0; p < P; ++p) {
        const auto row = d_in.row(p);
        copy_into(d_prev_incidence.row(p), 0, row.subspan(0, Dm));
        add_row(dH_in.row(members[p]), row.subspan(Dm, D));
      }
    } else {
      Matrix d_msg(N, Dm, 0.0);
      for (std::size_t p = 0; p < P; ++p) add_row(d_msg.row(members[p]), d_me.row(incidence_edge[p]));
      const Matrix d_in = part(ModelPart::kPhi).backward(it.phi, d_msg, grads.parts[idx(ModelPart::kPhi)]);
      auto dst = dH_in.values();
      const auto src = d_in.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    dH = std::move(dH_in);
  }

  if (second) {
    auto g = grads.initial_message.row(0);
    for (std::size_t p = 0; p < P; ++p) add_row(g, d_prev_incidence.row(p));
  }
  if (!cache.external_initial_state) {
    auto dst = dX0.values();
    const auto src = dH.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  Matrix dX = part(ModelPart::kEncoder)
                  .backward(cache.encoder, dX0, grads.parts[idx(ModelPart::kEncoder)]);
  if (!cache.input_dropout_scale.empty()) {
    auto dv = dX.values();
    const auto sv = cache.input_dropout_scale.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= sv[i];
  }
  return dX;
}

std::vector<NamedTensor> EdHnnModel::named_tensors() const {
  std::vector<NamedTensor> out;
  for (ModelPart p : kParts) {
    const auto& params = part(p).params();
    for (std::size_t i = 0; i < params.size(); ++i)
      out.push_back({to_string(p) + "." + std::to_string(i), params[i]});
  }
  if (!initial_message_.empty()) out.push_back({"initial_message", initial_message_});
  return out;
}

void EdHnnModel::load_tensors(std::span<const NamedTensor> tensors) {
  const auto expected = named_tensors();
  if (tensors.size() != expected.size())
    throw ParseError("/tensors", "expected " + std::to_string(expected.size()) + " tensors, got " +
                                     std::to_string(tensors.size()));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& want = expected[i];
    const auto& got = tensors[i];
    if (got.name != want.name || got.value.rows() != want.value.rows() ||
        got.value.cols() != want.value.cols())
      throw ParseError("/tensors/" + std::to_string(i),
                       "expected " + want.name + " [" + std::to_string(want.value.rows()) + "x" +
                           std::to_string(want.value.cols()) + "]");
  }
  std::size_t k = 0;
  for (auto& m : mlps_)
    for (auto& p : m.mutable_params()) p = tensors[k++].value;
  if (!initial_message_.empty()) initial_message_ = tensors[k].value;
}

std::vector<std::vector<double>> edge_messages(const MessageFunctions& fns,
                                               const std::vector<std::vector<double>>& members) {
  std::vector<std::vector<double>> phis;
  phis.reserve(members.size());
  for (const auto& h : members) phis.push_back(fns.phi(h));
  std::vector<double> m_e;
  if (!phis.empty()) {
    m_e.assign(phis[0].size(), 0.0);
    std::vector<double> column(phis.size());
    for (std::size_t c = 0; c < m_e.size(); ++c) {
      for (std::size_t i = 0; i < phis.size(); ++i) column[i] = phis[i].at(c);
      std::sort(column.begin(), column.end());
      for (double v : column) m_e[c] += v;
    }
  }
  std::vector<std::vector<double>> out;
  out.reserve(members.size());
  for (const auto& h : members) out.push_back(fns.rho(h, m_e));
  return out;
}

Matrix message_passing_step(const Hypergraph& h, const Matrix& H, const Matrix& X,
                            const MessageFunctions& fns) {
  if (H.rows() != h.num_nodes() || X.rows() != h.num_nodes())
    throw ValidationError("message_passing_step: row count != num_nodes");
  std::vector<std::vector<double>> agg(h.num_nodes());
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto edge = h.edge(e);
    std::vector<std::vector<double>> rows;
    for (std::size_t v : edge) rows.emplace_back(H.row(v).begin(), H.row(v).end());
    const auto msgs = edge_messages(fns, rows);
    for (std::size_t i = 0; i < edge.size(); ++i) {
      auto& a = agg[edge[i]];
      if (a.empty()) a.assign(msgs[i].size(), 0.0);
      for (std::size_t j = 0; j < a.size(); ++j) a[j] += msgs[i][j];
    }
  }
  Matrix out(H.rows(), H.cols());
  for (std::size_t v = 0; v < h.num_nodes(); ++v) {
    if (agg[v].empty()) agg[v].assign(H.cols(), 0.0);
    const auto next = fns.update(H.row(v), agg[v], X.row(v), static_cast<double>(h.degree(v)));
    if (next.size() != H.cols()) throw ValidationError("message_passing_step: update width mismatch");
    std::copy(next.begin(), next.end(), out.row(v).begin());
  }
  return out;
}

MessageFunctions clique_expansion_functions(double eta) {
  MessageFunctions fns;
  fns.phi = [](std::span<const double> h) {
    std::vector<double> out(h.begin(), h.end());
    out.push_back(1.0);
    return out;
  };
  fns.rho = [](std::span<const double> h, std::span<const double> m_e) {
    const double n = m_e.back();
    std::vector<double> out(h.size());
    for (std::size_t c = 0; c < h.size(); ++c) out[c] = 4.0 * (n * h[c] - m_e[c]);
    return out;
  };
  fns.update = [eta](std::span<const double> h, std::span<const double> agg, std::span<const double> x,
                     double) {
    std::vector<double> out(h.size());
    for (std::size_t c = 0; c < h.size(); ++c) out[c] = h[c] - eta * (2.0 * (h[c] - x[c]) + agg[c]);
    return out;
  };
  return fns;
}

EdHnnModel clique_expansion_model(double eta, std::size_t edge_size) {
  EdHnnConfig c;
  c.variant = ModelVariant::kEdHnn;
  c.num_iterations = 1;
  c.input_dim = 1;
  c.hidden_dim = 2;
  c.encoder_layers = 0;
  c.phi_layers = 1;
  c.rho_layers = 1;
  c.update_layers = 1;
  c.classifier_layers = 0;
  c.input_dropout = 0.0;
  c.dropout = 0.0;
  c.layer_norm = false;
  Rng rng(0);
  EdHnnModel model(c, rng);

  // phi: h -> (h, 1)
  auto& phi = model.mutable_part(ModelPart::kPhi).mutable_params();
  phi[0] = Matrix::from_rows({{1.0, 0.0}});
  phi[1] = Matrix::from_rows({{0.0, 1.0}});
  // rho: [h, S, n] -> (4 (n h - S), 0) with n fixed to edge_size
  auto& rho = model.mutable_part(ModelPart::kRho).mutable_params();
  rho[0] = Matrix::from_rows({{4.0 * static_cast<double>(edge_size), 0.0}, {-4.0, 0.0}, {0.0, 0.0}});
  rho[1] = Matrix(1, 2, 0.0);
  // update: [h, agg0, agg1, x, d] -> (1 - 2 eta) h - eta agg0 + 2 eta x
  auto& upd = model.mutable_part(ModelPart::kUpdate).mutable_params();
  upd[0] = Matrix::from_rows({{1.0 - 2.0 * eta}, {-eta}, {0.0}, {2.0 * eta}, {0.0}});
  upd[1] = Matrix(1, 1, 0.0);
  return model;
}

}  // namespace hgdiff
