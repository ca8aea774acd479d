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

#include "hgdiff/nn.hpp"

#include <atomic>
#include <cmath>

#include "hgdiff/error.hpp"
#include "json.hpp"

namespace hgdiff {

namespace {

std::atomic<std::uint64_t> next_mlp_id{1};

void add_bias(Matrix& y, const Matrix& b) {
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += b(0, j);
  }
}

void accumulate_column_sums(const Matrix& g, Matrix& into) {
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const auto row = g.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) into(0, j) += row[j];
  }
}

void add_to(Matrix& into, const Matrix& g) {
  auto dst = into.values();
  const auto src = g.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix layer_norm(const Matrix& x, double eps) {
  Matrix y(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + eps);
    auto out = y.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean) * inv;
  }
  return y;
}

Mlp::Mlp(const MlpSpec& spec, Rng& rng) : spec_(spec), id_(next_mlp_id++) {
  if (spec.layers == 0) {
    if (spec.in_dim != spec.out_dim)
      throw ValidationError("a 0-layer MLP is the identity and needs in_dim == out_dim");
    return;
  }
  for (std::size_t l = 0; l < spec.layers; ++l) {
    const std::size_t fan_in = l == 0 ? spec.in_dim : spec.hidden_dim;
    const std::size_t fan_out = l + 1 == spec.layers ? spec.out_dim : spec.hidden_dim;
    layer_offsets_.push_back(params_.size());
    Matrix w(fan_in, fan_out);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.values()) v = rng.uniform(-bound, bound);
    params_.push_back(std::move(w));
    params_.emplace_back(1, fan_out, 0.0);
    if (has_norm(l)) {
      params_.emplace_back(1, fan_out, 1.0);
      params_.emplace_back(1, fan_out, 0.0);
    }
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

std::vector<Matrix> Mlp::zero_grads() const {
  std::vector<Matrix> g;
  g.reserve(params_.size());
  for (const auto& p : params_) g.emplace_back(p.rows(), p.cols(), 0.0);
  return g;
}

Matrix Mlp::forward(const Matrix& x, MlpCache* cache, const ForwardOptions& options,
                    const std::string& where) const {
  if (x.cols() != spec_.in_dim)
    throw ValidationError(where + ": input width " + std::to_string(x.cols()) + " != expected " +
                          std::to_string(spec_.in_dim));
  if (cache) {
    cache->layers.clear();
    cache->owner = id_;
    cache->generation = generation_;
  }
  if (spec_.layers == 0) return x;
  const bool use_dropout = options.train && options.dropout > 0.0;
  if (use_dropout && options.rng == nullptr)
    throw ValidationError(where + ": dropout in train mode needs an rng");

  Matrix h = x;
  for (std::size_t l = 0; l < spec_.layers; ++l) {
    const std::size_t off = layer_offsets_[l];
    Matrix a = matmul(h, params_[off]);
    add_bias(a, params_[off + 1]);
    if (l + 1 == spec_.layers) {
      if (cache) cache->layers.push_back({std::move(h), {}, {}, {}, {}});
      h = std::move(a);
      break;
    }
    MlpCache::Layer layer;
    if (has_norm(l)) {
      const Matrix& gamma = params_[off + 2];
      const Matrix& beta = params_[off + 3];
      const double n = static_cast<double>(a.cols());
      layer.xhat = Matrix(a.rows(), a.cols());
      layer.inv_std.resize(a.rows());
      for (std::size_t r = 0; r < a.rows(); ++r) {
        auto row = a.row(r);
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= n;
        const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        layer.inv_std[r] = inv;
        auto xh = layer.xhat.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) {
          xh[j] = (row[j] - mean) * inv;
          row[j] = gamma(0, j) * xh[j] + beta(0, j);
        }
      }
    }
    Matrix out = relu(a);
    if (use_dropout) {
      const double keep = 1.0 - options.dropout;
      layer.dropout_scale = Matrix(out.rows(), out.cols());
      auto scale = layer.dropout_scale.values();
      auto vals = out.values();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        scale[i] = options.rng->uniform() < keep ? 1.0 / keep : 0.0;
        vals[i] *= scale[i];
      }
    }
    if (cache) {
      layer.input = std::move(h);
      layer.activation = std::move(a);
      cache->layers.push_back(std::move(layer));
    }
    h = std::move(out);
  }
  return h;
}

Matrix Mlp::backward(const MlpCache& cache, const Matrix& grad_out, std::vector<Matrix>& grads) const {
  if (cache.owner != id_ || cache.generation != generation_)
    throw Error("mlp backward: stale cache (parameters changed since forward)");
  if (spec_.layers == 0) return grad_out;
  if (cache.layers.size() != spec_.layers) throw Error("mlp backward: cache is incomplete");
  if (grads.size() != params_.size()) throw ValidationError("mlp backward: gradient list size mismatch");

  Matrix g = grad_out;
  for (std::size_t li = spec_.layers; li-- > 0;) {
    const auto& layer = cache.layers[li];
    const std::size_t off = layer_offsets_[li];
    if (li + 1 < spec_.layers) {
      // dropout, then ReLU on the (normalized) activation
      if (!layer.dropout_scale.empty()) {
        auto gv = g.values();
        const auto sv = layer.dropout_scale.values();
        for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= sv[i];
      }
      {
        auto gv = g.values();
        const auto av = layer.activation.values();
        for (std::size_t i = 0; i < gv.size(); ++i)
          if (!(av[i] > 0.0)) gv[i] = 0.0;
      }
      if (has_norm(li)) {
        const Matrix& gamma = params_[off + 2];
        Matrix& dgamma = grads[off + 2];
        Matrix& dbeta = grads[off + 3];
        const double n = static_cast<double>(g.cols());
        for (std::size_t r = 0; r < g.rows(); ++r) {
          auto gr = g.row(r);
          const auto xh = layer.xhat.row(r);
          double mean_d = 0.0, mean_dx = 0.0;
          for (std::size_t j = 0; j < gr.size(); ++j) {
            dgamma(0, j) += gr[j] * xh[j];
            dbeta(0, j) += gr[j];
            const double dxh = gr[j] * gamma(0, j);
            mean_d += dxh;
            mean_dx += dxh * xh[j];
          }
          mean_d /= n;
          mean_dx /= n;
          const double inv = layer.inv_std[r];
          for (std::size_t j = 0; j < gr.size(); ++j) {
            const double dxh = gr[j] * gamma(0, j);
            gr[j] = inv * (dxh - mean_d - xh[j] * mean_dx);
          }
        }
      }
    }
    add_to(grads[off], matmul_tn(layer.input, g));
    accumulate_column_sums(g, grads[off + 1]);
    g = matmul_nt(g, params_[off]);
  }
  return g;
}

void Adam::step(std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) throw ValidationError("adam: params/grads size mismatch");
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.emplace_back(p->rows(), p->cols(), 0.0);
      v_.emplace_back(p->rows(), p->cols(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw ValidationError("adam: parameter list changed");
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto pv = params[i]->values();
    const auto gv = grads[i]->values();
    auto mv = m_[i].values();
    auto vv = v_[i].values();
    if (pv.size() != gv.size() || pv.size() != mv.size())
      throw ValidationError("adam: shape mismatch at parameter " + std::to_string(i));
    for (std::size_t j = 0; j < pv.size(); ++j) {
      const double g = gv[j] + options_.weight_decay * pv[j];
      mv[j] = b1 * mv[j] + (1.0 - b1) * g;
      vv[j] = b2 * vv[j] + (1.0 - b2) * g * g;
      const double mhat = mv[j] / c1;
      const double vhat = vv[j] / c2;
      pv[j] -= options_.lr * mhat / (std::sqrt(vhat) + options_.eps);
    }
  }
}

LossResult cross_entropy_loss(const Matrix& logits, std::span<const std::size_t> labels,
                              const std::vector<bool>& mask) {
  if (labels.size() != logits.rows() || mask.size() != logits.rows())
    throw ValidationError("cross_entropy_loss: labels/mask length != rows");
  std::size_t count = 0;
  for (bool m : mask) count += m ? 1 : 0;
  if (count == 0) throw ValidationError("cross_entropy_loss: empty mask");
  LossResult r;
  r.grad = Matrix(logits.rows(), logits.cols());
  const double inv_count = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    if (labels[i] >= logits.cols()) throw ValidationError("cross_entropy_loss: label out of range");
    const auto row = logits.row(i);
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    const double log_z = mx + std::log(z);
    r.loss += (log_z - row[labels[i]]) * inv_count;
    auto g = r.grad.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) g[j] = std::exp(row[j] - log_z) * inv_count;
    g[labels[i]] -= inv_count;
  }
  return r;
}

LossResult mean_absolute_error(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ValidationError("mean_absolute_error: shape mismatch");
  LossResult r;
  r.grad = Matrix(pred.rows(), pred.cols());
  const auto pv = pred.values();
  const auto tv = target.values();
  auto gv = r.grad.values();
  const double inv = 1.0 / static_cast<double>(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - tv[i];
    r.loss += std::abs(d) * inv;
    gv[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
  }
  return r;
}

std::string tensors_to_json(std::span<const NamedTensor> tensors) {
  nlohmann::json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : tensors) {
    list.push_back({{"name", t.name},
                    {"rows", t.value.rows()},
                    {"cols", t.value.cols()},
                    {"values", std::vector<double>(t.value.values().begin(), t.value.values().end())}});
  }
  doc["tensors"] = std::move(list);
  return doc.dump() + "\n";
}

std::vector<NamedTensor> tensors_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("tensors"))
    throw ParseError("/", "not a checkpoint document");
  if (doc["format_version"] != kCheckpointFormatVersion)
    throw ParseError("/format_version", "unsupported checkpoint version " + doc["format_version"].dump());
  std::vector<NamedTensor> out;
  const auto& list = doc["tensors"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "/tensors/" + std::to_string(i);
    const auto& t = list[i];
    try {
      const auto rows = t.at("rows").get<std::size_t>();
      const auto cols = t.at("cols").get<std::size_t>();
      const auto values = t.at("values").get<std::vector<double>>();
      if (values.size() != rows * cols) throw ParseError(at, "values length != rows * cols");
      Matrix m(rows, cols);
      std::copy(values.begin(), values.end(), m.values().begin());
      out.push_back({t.at("name").get<std::string>(), std::move(m)});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(at, e.what());
    }
  }
  return out;
}

}  // namespace hgdiff
