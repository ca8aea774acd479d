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

#include <filesystem>
#include <string>

#include "hgdiff/hypergraph.hpp"

namespace hgdiff {

inline constexpr int kDatasetFormatVersion = 1;

// JSON dataset document:
//   {"num_nodes": int, "hyperedges": [[int,...],...], "labels": [...]|null,
//    "features": [[...],...]|null,
//    "masks": {"train": [...], "val": [...], "test": [...]}|null,
//    "format_version": 1}
// Masks are stored as node-index lists. Hyperedges are written canonical.
std::string dataset_to_json(const LabeledHypergraph& d);
LabeledHypergraph dataset_from_json(const std::string& text);

void save_dataset(const LabeledHypergraph& d, const std::filesystem::path& path);
LabeledHypergraph load_dataset(const std::filesystem::path& path);

// Whole-file helpers shared by the other file formats.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hgdiff
