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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hgdiff/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hypergraph diffusion and equivariant diffusion networks"};
  app.require_subcommand(1);
  hgdiff::CommandRequest request;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  for (const char* name : {"generate", "diffuse", "train", "check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hgdiff::kExitConfigError;
  }
  const auto* sub = app.get_subcommands().front();
  request.command = sub->get_name();
  request.config = config;
  if (sub->count("--out") > 0) request.out = out;
  if (sub->count("--seed") > 0) request.seed = seed;
  return hgdiff::run_command(request, std::cout, std::cerr);
}
