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

#include <stdexcept>
#include <string>

namespace hgdiff {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a structural precondition (bad index, empty hyperedge, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be decoded. `location` names the line or field path.
class ParseError : public Error {
 public:
  ParseError(const std::string& location, const std::string& what)
      : Error(location + ": " + what), location_(location), detail_(what) {}

  const std::string& location() const { return location_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string location_;
  std::string detail_;
};

// An iterative inner solver hit its iteration cap.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (last residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

// A computation produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A run configuration document is invalid. `field` is a JSON-pointer-like path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace hgdiff
