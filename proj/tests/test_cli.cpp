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

#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "hgdiff/cli.hpp"
#include "hgdiff/dataset_io.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace hgdiff {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Outcome {
  int code;
  std::string err;
};

Outcome run(const std::string& command, const fs::path& dir, const Json& config, const std::string& out = "out") {
  const fs::path cfg = dir / (command + "_" + out + ".json");
  write_text_file(cfg, config.dump());
  std::ostringstream log, err;
  const int code = run_command({command, cfg, dir / out, std::nullopt}, log, err);
  return {code, err.str()};
}

Json read_json(const fs::path& p) { return Json::parse(read_text_file(p)); }

std::map<std::string, std::string> files_in(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_text_file(e.path());
  return out;
}

std::vector<std::vector<double>> trace_rows(const fs::path& csv) {
  std::istringstream in(read_text_file(csv));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iter,objective,max_change");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

// Toy dataset with one feature channel for the diffuse command.
fs::path toy_dataset(const fs::path& dir) {
  LabeledHypergraph d;
  d.hypergraph = Hypergraph::build({{0, 1, 2}, {2, 3}, {3, 4, 5}, {0, 5}}, 6);
  d.features = Matrix::from_rows({{1.0}, {-2.0}, {0.5}, {3.0}, {0.0}, {-1.0}});
  save_dataset(d, dir / "toy.json");
  return dir / "toy.json";
}

TEST(Cli, GenerateCsbmAtPaperScale) {
  const auto dir = testing::scratch_dir("cli_csbm");
  ASSERT_EQ(run("generate", dir, {{"kind", "csbm"}, {"seed", 1}, {"csbm", {{"alpha", 4}}}}).code, kExitOk);
  const Json s = read_json(dir / "out/summary.json");
  EXPECT_EQ(s["num_nodes"], 5000);
  EXPECT_EQ(s["num_hyperedges"], 1000);
  const LabeledHypergraph d = load_dataset(dir / "out/dataset.json");
  EXPECT_EQ(d.features->cols(), 100u);
  EXPECT_TRUE(d.masks.has_value());
}

TEST(Cli, GeneratePairsAndRerunByteIdentically) {
  const auto dir = testing::scratch_dir("cli_pairs");
  const Json cfg = {{"kind", "diffusion_pairs"},
                    {"seed", 3},
                    {"hypergraph", {{"uniform", {{"num_nodes", 30}, {"num_hyperedges", 10}, {"edge_size", 4}}}}},
                    {"pairs", {{"potential", {{"kind", "ce"}}}}}};
  ASSERT_EQ(run("generate", dir, cfg, "a").code, kExitOk);
  ASSERT_EQ(run("generate", dir, cfg, "b").code, kExitOk);
  EXPECT_EQ(read_json(dir / "a/pairs.json")["pairs"].size(), 1000u);
  auto a = files_in(dir / "a"), b = files_in(dir / "b");
  a.erase("manifest.json");
  b.erase("manifest.json");
  EXPECT_EQ(a, b);
  const Json manifest = read_json(dir / "a/manifest.json");
  EXPECT_EQ(manifest["outputs"], Json({"hypergraph.json", "pairs.json", "summary.json"}));
}

TEST(Cli, ManifestConfigReproducesTheRun) {
  const auto dir = testing::scratch_dir("cli_manifest");
  const Json cfg = {{"kind", "csbm"},
                    {"seed", 5},
                    {"csbm", {{"nodes_per_class", 50}, {"num_hyperedges", 20}, {"alpha", 2}}},
                    {"features", {{"dim", 4}}}};
  ASSERT_EQ(run("generate", dir, cfg, "first").code, kExitOk);
  Json again = read_json(dir / "first/manifest.json")["config"];
  again.erase("out");
  ASSERT_EQ(run("generate", dir, again, "second").code, kExitOk);
  EXPECT_EQ(read_text_file(dir / "first/dataset.json"), read_text_file(dir / "second/dataset.json"));
}

TEST(Cli, DiffuseTraceIsMonotoneAndTruncates) {
  const auto dir = testing::scratch_dir("cli_diffuse");
  const fs::path data = toy_dataset(dir);
  const Json gd = {{"dataset", data.string()},
                   {"potential", {{"kind", "ce"}}},
                   {"mode", "gd"},
                   {"solver", {{"eta", 0.01}, {"max_iters", 20000}, {"stop_tol", 1e-13}}}};
  ASSERT_EQ(run("diffuse", dir, gd, "gd").code, kExitOk);
  const auto rows = trace_rows(dir / "gd/trajectory.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i][1], rows[i - 1][1] * (1.0 + 1e-14));

  Json one = gd;
  one["solver"]["max_iters"] = 1;
  ASSERT_EQ(run("diffuse", dir, one, "one").code, kExitOk);
  EXPECT_EQ(trace_rows(dir / "one/trajectory.csv").size(), 2u);

  Json admm = gd;
  admm["mode"] = "admm";
  admm["solver"]["eta"] = 0.5;
  ASSERT_EQ(run("diffuse", dir, admm, "admm").code, kExitOk);
  EXPECT_NEAR(read_json(dir / "admm/summary.json")["final_objective"].get<double>(),
              read_json(dir / "gd/summary.json")["final_objective"].get<double>(), 1e-4);
  EXPECT_TRUE(load_dataset(dir / "admm/final_state.json").features.has_value());
}

TEST(Cli, TrainDepthSweepSharesParameters) {
  const auto dir = testing::scratch_dir("cli_depth");
  ASSERT_EQ(run("generate", dir,
                {{"kind", "csbm"},
                 {"seed", 2},
                 {"csbm", {{"nodes_per_class", 40}, {"num_hyperedges", 16}, {"alpha", 2}}},
                 {"features", {{"dim", 8}}}},
                "data")
                .code,
            kExitOk);
  const Json cfg = {{"dataset", (dir / "data/dataset.json").string()},
                    {"epochs", 2},
                    {"model", {{"hidden_dim", 8}, {"classifier_hidden", 8}}},
                    {"sweep", {{"num_iterations", {1, 2, 4, 8}}}}};
  ASSERT_EQ(run("train", dir, cfg).code, kExitOk);
  const Json s = read_json(dir / "out/summary.json");
  ASSERT_EQ(s["runs"].size(), 4u);
  for (const auto& r : s["runs"]) EXPECT_EQ(r["parameter_count"], s["runs"][0]["parameter_count"]);
  for (int L : {1, 2, 4, 8}) {
    EXPECT_TRUE(fs::exists(dir / "out" / ("metrics_L" + std::to_string(L) + ".csv")));
    EXPECT_TRUE(fs::exists(dir / "out" / ("checkpoint_L" + std::to_string(L) + ".json")));
  }
}

TEST(Cli, TrainClassificationOnHomophilicCsbm) {
  const auto dir = testing::scratch_dir("cli_alpha1");
  ASSERT_EQ(run("generate", dir,
                {{"kind", "csbm"}, {"seed", 1}, {"csbm", {{"nodes_per_class", 500}, {"num_hyperedges", 200}}}},
                "data")
                .code,
            kExitOk);
  const Json cfg = {{"dataset", "data/dataset.json"},
                    {"seed", 1},
                    {"epochs", 100},
                    {"model", {{"hidden_dim", 32}, {"classifier_hidden", 32}}}};
  ASSERT_EQ(run("train", dir, cfg).code, kExitOk);
  EXPECT_GT(read_json(dir / "out/summary.json")["test_acc"].get<double>(), 0.95);
}

TEST(Cli, TrainRegressionHiddenSweep) {
  const auto dir = testing::scratch_dir("cli_regression");
  ASSERT_EQ(run("generate", dir,
                {{"kind", "diffusion_pairs"},
                 {"hypergraph", {{"uniform", {{"num_nodes", 20}, {"num_hyperedges", 8}, {"edge_size", 3}}}}},
                 {"pairs", {{"num_pairs", 10}, {"potential", {{"kind", "tv"}}}}}},
                "data")
                .code,
            kExitOk);
  const Json cfg = {{"task", "regression"},
                    {"pairs", "data/pairs.json"},
                    {"epochs", 2},
                    {"sweep", {{"hidden_dim", {32, 64, 128}}}}};
  ASSERT_EQ(run("train", dir, cfg).code, kExitOk);
  const std::string csv = read_text_file(dir / "out/mae.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "hidden_dim,heldout_mae,identity_mae,parameter_count");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_TRUE(fs::exists(dir / "out/loss_h128.csv"));
}

TEST(Cli, CheckPassesAndDetectsInjectedFault) {
  const auto dir = testing::scratch_dir("cli_check");
  ASSERT_EQ(run("check", dir, Json::object(), "clean").code, kExitOk);
  const Json report = read_json(dir / "clean/report.json");
  EXPECT_TRUE(report["passed"].get<bool>());
  for (const auto& s : report["suites"]) EXPECT_TRUE(s.contains("max_residual"));
  EXPECT_EQ(run("check", dir, {{"inject_fault", true}}, "fault").code, kExitPropertyFailure);
  EXPECT_FALSE(read_json(dir / "fault/report.json")["passed"].get<bool>());
}

TEST(Cli, ConfigErrorsNameTheField) {
  const auto dir = testing::scratch_dir("cli_errors");
  Outcome r = run("generate", dir, {{"kind", "csbm"}, {"csbm", {{"alpah", 4}}}});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("/csbm/alpah"), std::string::npos) << r.err;
  r = run("generate", dir, {{"kind", "lattice"}});
  EXPECT_EQ(r.code, kExitConfigError);
  r = run("train", dir, {{"dataset", "x.json"}, {"model", {{"variant", "allset"}}}});
  EXPECT_EQ(r.code, kExitConfigError);
  r = run("check", dir, {{"suites", {"nope"}}});
  EXPECT_EQ(r.code, kExitConfigError);

  std::ostringstream log, err;
  EXPECT_EQ(run_command({"check", dir / "missing.json", dir / "o", std::nullopt}, log, err), kExitConfigError);
  EXPECT_EQ(run_command({"explode", dir / "missing.json", dir / "o", std::nullopt}, log, err), kExitConfigError);
}

TEST(Cli, RuntimeErrorsExitThree) {
  const auto dir = testing::scratch_dir("cli_runtime");
  EXPECT_EQ(run("diffuse", dir, {{"dataset", "absent.json"}}).code, kExitRuntimeError);
  LabeledHypergraph bare;
  bare.hypergraph = Hypergraph::build({{0, 1}}, 2);
  save_dataset(bare, dir / "bare.json");
  EXPECT_EQ(run("diffuse", dir, {{"dataset", "bare.json"}}).code, kExitRuntimeError);
}

}  // namespace
}  // namespace hgdiff
