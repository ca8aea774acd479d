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

#include "json_convert.hpp"

namespace hgdiff::detail {

std::string join_path(const std::string& base, const std::string& key) {
  return (base == "/" ? "" : base) + "/" + key;
}

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(path_, "expected an object");
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

const Json& ObjectReader::raw(const std::string& key) {
  used_.insert(key);
  if (!j_.contains(key)) throw ConfigError(path_of(key), "missing required field");
  return j_.at(key);
}

ObjectReader ObjectReader::child(const std::string& key) { return ObjectReader(raw(key), path_of(key)); }

void ObjectReader::finish() const {
  for (const auto& [key, value] : j_.items())
    if (!used_.contains(key)) throw ConfigError(path_of(key), "unknown field");
}

Json to_json(const EdgePotentialSpec& spec) {
  Json j{{"kind", to_string(spec.kind)}, {"p", spec.p}};
  if (spec.y) j["y"] = *spec.y;
  return j;
}

EdgePotentialSpec edge_potential_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const auto kind = r.require<std::string>("kind");
  EdgePotentialSpec spec;
  if (kind == "ce") {
    spec = EdgePotentialSpec::clique_expansion();
  } else if (kind == "ce_norm") {
    spec = EdgePotentialSpec::clique_expansion_normalized();
  } else if (kind == "div_mean") {
    spec = EdgePotentialSpec::divergence_to_mean(2.0);
  } else if (kind == "tv") {
    spec = EdgePotentialSpec::total_variation(2.0);
  } else if (kind == "lec") {
    spec = EdgePotentialSpec::lovasz_cardinality(2.0);
  } else {
    throw ConfigError(r.path_of("kind"), "unknown potential '" + kind + "' (ce, ce_norm, div_mean, tv, lec)");
  }
  spec.p = r.get<double>("p", spec.p);
  if (r.has("y")) {
    const Json& y = r.raw("y");
    if (!y.is_array()) throw ConfigError(r.path_of("y"), "expected an array of numbers");
    std::vector<double> values;
    for (std::size_t i = 0; i < y.size(); ++i)
      values.push_back(ObjectReader::convert<double>(y[i], r.path_of("y") + "/" + std::to_string(i)));
    spec.y = std::move(values);
  }
  r.finish();
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what());
  }
  return spec;
}

DiffusionMode diffusion_mode_from_string(const std::string& s, const std::string& path) {
  if (s == "gd") return DiffusionMode::kGradientDescent;
  if (s == "admm") return DiffusionMode::kAdmm;
  if (s == "admm_simplified") return DiffusionMode::kAdmmSimplified;
  throw ConfigError(path, "unknown mode '" + s + "' (gd, admm, admm_simplified)");
}

Json to_json(const SolverConfig& c) {
  return {{"eta", c.eta}, {"max_iters", c.max_iters}, {"stop_tol", c.stop_tol},
          {"record_trajectory", c.record_trajectory}};
}

SolverConfig solver_config_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  SolverConfig c;
  c.eta = r.get("eta", c.eta);
  c.max_iters = r.get("max_iters", c.max_iters);
  c.stop_tol = r.get("stop_tol", c.stop_tol);
  c.record_trajectory = r.get("record_trajectory", c.record_trajectory);
  r.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

Json to_json(const CsbmConfig& c) {
  return {{"nodes_per_class", c.nodes_per_class}, {"num_classes", c.num_classes},
          {"num_hyperedges", c.num_hyperedges},   {"edge_size", c.edge_size},
          {"alpha", c.alpha},                     {"randomize_minority", c.randomize_minority},
          {"seed", c.seed}};
}

CsbmConfig csbm_config_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  CsbmConfig c;
  c.nodes_per_class = r.get("nodes_per_class", c.nodes_per_class);
  c.num_classes = r.get("num_classes", c.num_classes);
  c.num_hyperedges = r.get("num_hyperedges", c.num_hyperedges);
  c.edge_size = r.get("edge_size", c.edge_size);
  c.alpha = r.get("alpha", c.alpha);
  c.randomize_minority = r.get("randomize_minority", c.randomize_minority);
  c.seed = r.get("seed", c.seed);
  r.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

Json to_json(const DiffusionPairConfig& c) {
  return {{"num_pairs", c.num_pairs},
          {"sigma_range", {c.sigma_min, c.sigma_max}},
          {"mode", to_string(c.mode)},
          {"potential", to_json(c.potential)},
          {"eta", c.resolved_eta()},
          {"seed", c.seed}};
}

DiffusionPairConfig diffusion_pair_config_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  DiffusionPairConfig c;
  c.num_pairs = r.get("num_pairs", c.num_pairs);
  if (r.has("sigma_range")) {
    const Json& s = r.raw("sigma_range");
    if (!s.is_array() || s.size() != 2) throw ConfigError(r.path_of("sigma_range"), "expected [min, max]");
    c.sigma_min = ObjectReader::convert<double>(s[0], r.path_of("sigma_range") + "/0");
    c.sigma_max = ObjectReader::convert<double>(s[1], r.path_of("sigma_range") + "/1");
  }
  c.mode = diffusion_mode_from_string(r.get<std::string>("mode", "gd"), r.path_of("mode"));
  if (r.has("potential")) c.potential = edge_potential_from_json(r.raw("potential"), r.path_of("potential"));
  if (r.has("eta")) c.eta = r.require<double>("eta");
  c.seed = r.get("seed", c.seed);
  r.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

Json to_json(const EdHnnConfig& c) {
  return {{"variant", to_string(c.variant)},
          {"num_iterations", c.num_iterations},
          {"input_dim", c.input_dim},
          {"hidden_dim", c.hidden_dim},
          {"encoder_layers", c.encoder_layers},
          {"phi_layers", c.phi_layers},
          {"rho_layers", c.rho_layers},
          {"update_layers", c.update_layers},
          {"classifier_layers", c.classifier_layers},
          {"classifier_hidden", c.classifier_hidden},
          {"output_dim", c.output_dim},
          {"input_dropout", c.input_dropout},
          {"dropout", c.dropout},
          {"layer_norm", c.layer_norm}};
}

EdHnnConfig edhnn_config_from_json(const Json& j, const std::string& path, const EdHnnConfig& defaults) {
  ObjectReader r(j, path);
  EdHnnConfig c = defaults;
  if (r.has("variant")) {
    try {
      c.variant = model_variant_from_string(r.require<std::string>("variant"));
    } catch (const ValidationError& e) {
      throw ConfigError(r.path_of("variant"), e.what());
    }
  }
  c.num_iterations = r.get("num_iterations", c.num_iterations);
  c.input_dim = r.get("input_dim", c.input_dim);
  c.hidden_dim = r.get("hidden_dim", c.hidden_dim);
  c.encoder_layers = r.get("encoder_layers", c.encoder_layers);
  c.phi_layers = r.get("phi_layers", c.phi_layers);
  c.rho_layers = r.get("rho_layers", c.rho_layers);
  c.update_layers = r.get("update_layers", c.update_layers);
  c.classifier_layers = r.get("classifier_layers", c.classifier_layers);
  c.classifier_hidden = r.get("classifier_hidden", c.classifier_hidden);
  c.output_dim = r.get("output_dim", c.output_dim);
  c.input_dropout = r.get("input_dropout", c.input_dropout);
  c.dropout = r.get("dropout", c.dropout);
  c.layer_norm = r.get("layer_norm", c.layer_norm);
  r.finish();
  return c;
}

}  // namespace hgdiff::detail
