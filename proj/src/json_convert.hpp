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

#include <cstdint>
#include <set>
#include <string>
#include <type_traits>

#include "hgdiff/diffusion.hpp"
#include "hgdiff/edhnn.hpp"
#include "hgdiff/error.hpp"
#include "hgdiff/potentials.hpp"
#include "hgdiff/synth.hpp"
#include "json.hpp"

namespace hgdiff::detail {

using Json = nlohmann::json;

std::string join_path(const std::string& base, const std::string& key);

/// Read-only view of a JSON object that tracks which keys were consumed, so
/// finish() can reject unknown ones with their full path.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  const std::string& path() const { return path_; }
  std::string path_of(const std::string& key) const { return join_path(path_, key); }
  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);
  ObjectReader child(const std::string& key);

  template <class T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(path_of(key), "missing required field");
    return convert<T>(raw(key), path_of(key));
  }

  template <class T>
  static T convert(const Json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(where, "expected a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where, "expected a string");
      return v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

  // Throws ConfigError naming the first unrecognized key.
  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Json to_json(const EdgePotentialSpec& spec);
EdgePotentialSpec edge_potential_from_json(const Json& j, const std::string& path);

DiffusionMode diffusion_mode_from_string(const std::string& s, const std::string& path);

Json to_json(const SolverConfig& c);
SolverConfig solver_config_from_json(const Json& j, const std::string& path);

Json to_json(const CsbmConfig& c);
CsbmConfig csbm_config_from_json(const Json& j, const std::string& path);

Json to_json(const DiffusionPairConfig& c);
DiffusionPairConfig diffusion_pair_config_from_json(const Json& j, const std::string& path);

Json to_json(const EdHnnConfig& c);
// Keys absent from `j` keep the value in `defaults`.
EdHnnConfig edhnn_config_from_json(const Json& j, const std::string& path,
                                   const EdHnnConfig& defaults = {});

}  // namespace hgdiff::detail
