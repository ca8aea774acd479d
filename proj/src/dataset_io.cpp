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

#include "hgdiff/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "hgdiff/error.hpp"
#include "json.hpp"

namespace hgdiff {

using nlohmann::json;

namespace {

std::size_t as_index(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ParseError(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

double as_real(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  return j.get<double>();
}

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("/") + key, "missing field");
  return doc.at(key);
}

std::vector<bool> mask_from_json(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of node indices");
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "/" + std::to_string(i);
    const std::size_t v = as_index(j[i], at);
    if (v >= n) throw ParseError(at, "node index " + std::to_string(v) + " >= num_nodes");
    mask[v] = true;
  }
  return mask;
}

json mask_to_json(const std::vector<bool>& mask) {
  json out = json::array();
  for (std::size_t v = 0; v < mask.size(); ++v)
    if (mask[v]) out.push_back(v);
  return out;
}

}  // namespace

std::string dataset_to_json(const LabeledHypergraph& d) {
  d.validate();
  json doc;
  doc["format_version"] = kDatasetFormatVersion;
  doc["num_nodes"] = d.hypergraph.num_nodes();
  doc["hyperedges"] = d.hypergraph.edge_lists();
  doc["labels"] = d.labels ? json(*d.labels) : json(nullptr);
  if (d.features) {
    json rows = json::array();
    for (std::size_t r = 0; r < d.features->rows(); ++r) {
      const auto row = d.features->row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    doc["features"] = std::move(rows);
  } else {
    doc["features"] = nullptr;
  }
  if (d.masks) {
    doc["masks"] = {{"train", mask_to_json(d.masks->train)},
                    {"val", mask_to_json(d.masks->val)},
                    {"test", mask_to_json(d.masks->test)}};
  } else {
    doc["masks"] = nullptr;
  }
  return doc.dump() + "\n";
}

LabeledHypergraph dataset_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!doc.is_object()) throw ParseError("/", "expected a JSON object");

  const json& version = require(doc, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kDatasetFormatVersion)
    throw ParseError("/format_version", "unsupported dataset format version " + version.dump() +
                                            " (expected " +
                                            std::to_string(kDatasetFormatVersion) + ")");

  const std::size_t n = as_index(require(doc, "num_nodes"), "/num_nodes");
  const json& edges_json = require(doc, "hyperedges");
  if (!edges_json.is_array()) throw ParseError("/hyperedges", "expected an array");
  std::vector<std::vector<std::size_t>> edges(edges_json.size());
  for (std::size_t e = 0; e < edges_json.size(); ++e) {
    const std::string at = "/hyperedges/" + std::to_string(e);
    const json& ej = edges_json[e];
    if (!ej.is_array()) throw ParseError(at, "expected an array of node indices");
    if (ej.empty()) throw ParseError(at, "hyperedge " + std::to_string(e) + " is empty");
    for (std::size_t i = 0; i < ej.size(); ++i) {
      const std::size_t v = as_index(ej[i], at + "/" + std::to_string(i));
      if (v >= n)
        throw ParseError(at, "hyperedge " + std::to_string(e) + " references node " +
                                 std::to_string(v) + " >= num_nodes " + std::to_string(n));
      edges[e].push_back(v);
    }
  }

  LabeledHypergraph d;
  d.hypergraph = Hypergraph::build(edges, n);

  if (doc.contains("labels") && !doc["labels"].is_null()) {
    const json& lj = doc["labels"];
    if (!lj.is_array() || lj.size() != n)
      throw ParseError("/labels", "expected an array of num_nodes class indices");
    std::vector<std::size_t> labels(n);
    for (std::size_t v = 0; v < n; ++v) labels[v] = as_index(lj[v], "/labels/" + std::to_string(v));
    d.labels = std::move(labels);
  }

  if (doc.contains("features") && !doc["features"].is_null()) {
    const json& fj = doc["features"];
    if (!fj.is_array() || fj.size() != n)
      throw ParseError("/features", "expected num_nodes feature rows");
    const std::size_t dim = n == 0 ? 0 : fj[0].size();
    Matrix features(n, dim);
    for (std::size_t v = 0; v < n; ++v) {
      const std::string at = "/features/" + std::to_string(v);
      if (!fj[v].is_array() || fj[v].size() != dim)
        throw ParseError(at, "expected a row of " + std::to_string(dim) + " numbers");
      for (std::size_t c = 0; c < dim; ++c)
        features(v, c) = as_real(fj[v][c], at + "/" + std::to_string(c));
    }
    d.features = std::move(features);
  }

  if (doc.contains("masks") && !doc["masks"].is_null()) {
    const json& mj = doc["masks"];
    if (!mj.is_object()) throw ParseError("/masks", "expected an object");
    SplitMasks masks;
    masks.train = mask_from_json(require(mj, "train"), n, "/masks/train");
    masks.val = mask_from_json(require(mj, "val"), n, "/masks/val");
    masks.test = mask_from_json(require(mj, "test"), n, "/masks/test");
    d.masks = std::move(masks);
  }

  try {
    d.validate();
  } catch (const ValidationError& e) {
    throw ParseError("/", e.what());
  }
  return d;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void save_dataset(const LabeledHypergraph& d, const std::filesystem::path& path) {
  write_text_file(path, dataset_to_json(d));
}

LabeledHypergraph load_dataset(const std::filesystem::path& path) {
  try {
    return dataset_from_json(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ":" + e.location(), e.detail());
  }
}

}  // namespace hgdiff
