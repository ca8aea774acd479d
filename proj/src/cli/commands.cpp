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

#include "hgdiff/cli.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hgdiff/checks.hpp"
#include "hgdiff/dataset_io.hpp"
#include "hgdiff/diffusion.hpp"
#include "hgdiff/edhnn.hpp"
#include "hgdiff/error.hpp"
#include "hgdiff/synth.hpp"
#include "hgdiff/training.hpp"
#include "json_convert.hpp"

namespace hgdiff {

namespace fs = std::filesystem;
using detail::Json;
using detail::ObjectReader;

namespace {

constexpr std::uint64_t kTagFeatures = 11;
constexpr std::uint64_t kTagSplit = 12;
constexpr std::uint64_t kTagPairs = 13;
constexpr std::uint64_t kTagShuffledPairs = 14;

struct Context {
  fs::path config_dir;
  fs::path out;
  std::uint64_t seed = 0;
  Json resolved = Json::object();
  std::vector<std::string> outputs;
  std::ostream* log = nullptr;

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return (path.is_absolute() ? path : config_dir / path).lexically_normal();
  }

  void write(const std::string& name, const std::string& text) {
    write_text_file(out / name, text);
    outputs.push_back(name);
    *log << "wrote " << (out / name).string() << "\n";
  }
};

std::vector<std::size_t> size_list(ObjectReader& r, const std::string& key) {
  const Json& j = r.raw(key);
  if (!j.is_array() || j.empty()) throw ConfigError(r.path_of(key), "expected a non-empty array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(ObjectReader::convert<std::size_t>(j[i], r.path_of(key) + "/" + std::to_string(i)));
  return out;
}

std::array<double, 3> read_fractions(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected [train, val, test] fractions");
  std::array<double, 3> f{};
  for (std::size_t i = 0; i < 3; ++i) f[i] = ObjectReader::convert<double>(j[i], path + "/" + std::to_string(i));
  return f;
}

Json summary_base(const std::string& command) { return Json{{"command", command}}; }

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int cmd_generate(ObjectReader& r, Context& ctx) {
  const auto kind = r.require<std::string>("kind");
  ctx.resolved["kind"] = kind;
  Json summary = summary_base("generate");
  summary["kind"] = kind;

  if (kind == "csbm") {
    CsbmConfig csbm = r.has("csbm") ? detail::csbm_config_from_json(r.raw("csbm"), r.path_of("csbm"))
                                    : CsbmConfig{};
    csbm.seed = ctx.seed;
    ctx.resolved["csbm"] = detail::to_json(csbm);

    std::optional<std::pair<std::size_t, double>> features = std::make_pair(std::size_t{100}, 1.0);
    if (r.has("features")) {
      const Json& fj = r.raw("features");
      if (fj.is_boolean() && !fj.get<bool>()) {
        features.reset();
      } else {
        ObjectReader f(fj, r.path_of("features"));
        features->first = f.get<std::size_t>("dim", 100);
        features->second = f.get<double>("class_separation", 1.0);
        f.finish();
        if (features->first < 1) throw ConfigError(f.path_of("dim"), "must be >= 1");
      }
    }
    std::optional<std::array<double, 3>> split = std::array<double, 3>{0.5, 0.25, 0.25};
    if (r.has("split")) {
      const Json& s = r.raw("split");
      if (s.is_boolean() && !s.get<bool>()) split.reset();
      else split = read_fractions(s, r.path_of("split"));
    }

    LabeledHypergraph d = gen_csbm(csbm);
    if (features) {
      d.features = gen_gaussian_features(*d.labels, features->first, mix_seed(ctx.seed, kTagFeatures),
                                         features->second);
      ctx.resolved["features"] = {{"dim", features->first}, {"class_separation", features->second}};
    } else {
      ctx.resolved["features"] = false;
    }
    if (split) {
      d.masks = split_dataset(d.hypergraph.num_nodes(), *split, mix_seed(ctx.seed, kTagSplit));
      ctx.resolved["split"] = *split;
    } else {
      ctx.resolved["split"] = false;
    }
    ctx.write("dataset.json", dataset_to_json(d));
    summary["num_nodes"] = d.hypergraph.num_nodes();
    summary["num_hyperedges"] = d.hypergraph.num_edges();
    summary["num_incidences"] = d.hypergraph.num_incidences();
    summary["ce_homophily"] = ce_homophily(d.hypergraph, *d.labels);
  } else if (kind == "uniform") {
    ObjectReader u = r.child("uniform");
    const auto n = u.require<std::size_t>("num_nodes");
    const auto m = u.require<std::size_t>("num_hyperedges");
    const auto k = u.require<std::size_t>("edge_size");
    u.finish();
    if (k < 1 || k > n) throw ConfigError(u.path_of("edge_size"), "must satisfy 1 <= edge_size <= num_nodes");
    ctx.resolved["uniform"] = {{"num_nodes", n}, {"num_hyperedges", m}, {"edge_size", k}};
    LabeledHypergraph d;
    d.hypergraph = gen_uniform_hypergraph(n, m, k, ctx.seed);
    ctx.write("dataset.json", dataset_to_json(d));
    summary["num_nodes"] = n;
    summary["num_hyperedges"] = m;
    summary["num_incidences"] = d.hypergraph.num_incidences();
  } else if (kind == "diffusion_pairs") {
    ObjectReader hg = r.child("hypergraph");
    Hypergraph h;
    std::string ref;
    if (hg.has("path")) {
      const fs::path path = ctx.resolve(hg.require<std::string>("path"));
      hg.finish();
      h = load_dataset(path).hypergraph;
      ref = path.string();
      ctx.resolved["hypergraph"] = {{"path", ref}};
    } else {
      ObjectReader u = hg.child("uniform");
      const auto n = u.require<std::size_t>("num_nodes");
      const auto m = u.require<std::size_t>("num_hyperedges");
      const auto k = u.require<std::size_t>("edge_size");
      u.finish();
      hg.finish();
      if (k < 1 || k > n) throw ConfigError(u.path_of("edge_size"), "must satisfy 1 <= edge_size <= num_nodes");
      h = gen_uniform_hypergraph(n, m, k, ctx.seed);
      LabeledHypergraph d;
      d.hypergraph = h;
      ctx.write("hypergraph.json", dataset_to_json(d));
      ref = "hypergraph.json";
      ctx.resolved["hypergraph"] = {{"uniform", {{"num_nodes", n}, {"num_hyperedges", m}, {"edge_size", k}}}};
    }
    DiffusionPairConfig pc = r.has("pairs")
                                 ? detail::diffusion_pair_config_from_json(r.raw("pairs"), r.path_of("pairs"))
                                 : DiffusionPairConfig{};
    pc.seed = mix_seed(ctx.seed, kTagPairs);
    pc.eta = pc.resolved_eta();
    ctx.resolved["pairs"] = detail::to_json(pc);
    ctx.resolved["pairs"].erase("seed");
    DiffusionPairFile file{ref, pc, gen_diffusion_pairs(h, pc)};
    ctx.write("pairs.json", diffusion_pairs_to_json(file));
    double id = 0.0;
    for (const auto& p : file.pairs) {
      double s = 0.0;
      for (std::size_t i = 0; i < p.h0.size(); ++i) s += std::abs(p.h0.values()[i] - p.h1.values()[i]);
      id += s / static_cast<double>(p.h0.size());
    }
    summary["num_pairs"] = file.pairs.size();
    summary["eta"] = pc.resolved_eta();
    summary["mean_identity_mae"] = id / static_cast<double>(file.pairs.size());
  } else {
    throw ConfigError(r.path_of("kind"), "unknown kind '" + kind + "' (csbm, uniform, diffusion_pairs)");
  }
  r.finish();
  ctx.write("summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// diffuse
// ---------------------------------------------------------------------------

int cmd_diffuse(ObjectReader& r, Context& ctx) {
  const fs::path dataset_path = ctx.resolve(r.require<std::string>("dataset"));
  const EdgePotentialSpec edge = r.has("potential") ? detail::edge_potential_from_json(r.raw("potential"), r.path_of("potential"))
                                                    : EdgePotentialSpec{};
  const auto node_name = r.get<std::string>("node_potential", "quadratic");
  NodePotentialSpec node;
  if (node_name == "quadratic") node.kind = NodePotentialKind::kQuadratic;
  else if (node_name == "linear") node.kind = NodePotentialKind::kLinear;
  else throw ConfigError(r.path_of("node_potential"), "unknown node potential '" + node_name + "' (quadratic, linear)");
  const DiffusionMode mode = detail::diffusion_mode_from_string(r.get<std::string>("mode", "gd"), r.path_of("mode"));
  const SolverConfig solver = r.has("solver") ? detail::solver_config_from_json(r.raw("solver"), r.path_of("solver"))
                                              : SolverConfig{};
  r.finish();
  ctx.resolved["dataset"] = dataset_path.string();
  ctx.resolved["potential"] = detail::to_json(edge);
  ctx.resolved["node_potential"] = node_name;
  ctx.resolved["mode"] = to_string(mode);
  ctx.resolved["solver"] = detail::to_json(solver);

  LabeledHypergraph d = load_dataset(dataset_path);
  if (!d.features) throw ValidationError("diffuse: dataset has no features to diffuse");
  const DiffusionResult res = run_diffusion(d.hypergraph, *d.features, {node, edge}, solver, mode);
  ctx.write("trajectory.csv", trajectory_csv(res.trace));
  LabeledHypergraph final_state = d;
  final_state.features = res.state.H;
  ctx.write("final_state.json", dataset_to_json(final_state));

  Json summary = summary_base("diffuse");
  summary["converged"] = res.converged;
  summary["iterations"] = res.trace.empty() ? 0 : res.trace.back().iter;
  summary["final_objective"] = res.trace.back().objective;
  summary["final_max_change"] = res.trace.back().max_change;
  ctx.write("summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct Sweep {
  std::string key;  // empty, "num_iterations", or "hidden_dim"
  std::vector<std::size_t> values;
};

Sweep read_sweep(ObjectReader& r) {
  Sweep s;
  if (!r.has("sweep")) return s;
  ObjectReader sw = r.child("sweep");
  for (const char* key : {"num_iterations", "hidden_dim"}) {
    if (!sw.has(key)) continue;
    if (!s.key.empty()) throw ConfigError(sw.path(), "sweep takes exactly one of num_iterations, hidden_dim");
    s.key = key;
    s.values = size_list(sw, key);
  }
  sw.finish();
  if (s.key.empty()) throw ConfigError(sw.path(), "sweep needs num_iterations or hidden_dim");
  return s;
}

std::string suffix(const Sweep& s, std::size_t v) {
  if (s.key.empty()) return "";
  return (s.key == "num_iterations" ? "_L" : "_h") + std::to_string(v);
}

void apply_sweep(const Sweep& s, std::size_t v, EdHnnConfig& c) {
  if (s.key == "num_iterations") c.num_iterations = v;
  else if (s.key == "hidden_dim") c.hidden_dim = v;
}

std::string checkpoint_json(const EdHnnModel& model) {
  Json doc = Json::parse(tensors_to_json(model.named_tensors()));
  doc["config"] = detail::to_json(model.config());
  return doc.dump() + "\n";
}

EdHnnConfig regression_defaults() {
  EdHnnConfig c;
  c.num_iterations = 1;
  c.input_dim = 1;
  c.hidden_dim = 64;
  c.encoder_layers = 0;
  c.phi_layers = 2;
  c.rho_layers = 2;
  c.update_layers = 2;
  c.classifier_layers = 0;
  c.input_dropout = 0.0;
  c.dropout = 0.0;
  c.layer_norm = false;
  return c;
}

int cmd_train(ObjectReader& r, Context& ctx) {
  const auto task = r.get<std::string>("task", "classification");
  AdamOptions adam;
  adam.lr = r.get("lr", adam.lr);
  adam.weight_decay = r.get("weight_decay", adam.weight_decay);
  if (!(adam.lr > 0.0)) throw ConfigError(r.path_of("lr"), "must be > 0");
  if (!(adam.weight_decay >= 0.0)) throw ConfigError(r.path_of("weight_decay"), "must be >= 0");
  const Sweep sweep = read_sweep(r);
  ctx.resolved["task"] = task;
  ctx.resolved["lr"] = adam.lr;
  ctx.resolved["weight_decay"] = adam.weight_decay;
  if (!sweep.key.empty()) ctx.resolved["sweep"] = {{sweep.key, sweep.values}};
  Json summary = summary_base("train");
  summary["task"] = task;
  Json runs = Json::array();

  if (task == "classification") {
    const fs::path dataset_path = ctx.resolve(r.require<std::string>("dataset"));
    const auto epochs = r.get<std::size_t>("epochs", 200);
    const Json model_json = r.has("model") ? r.raw("model") : Json::object();
    r.finish();
    // Field and enum errors are config errors even when the dataset is unreadable.
    detail::edhnn_config_from_json(model_json, r.path_of("model"), EdHnnConfig{});
    const LabeledHypergraph d = load_dataset(dataset_path);
    if (!d.features || !d.labels) throw ValidationError("train: dataset needs features and labels");
    EdHnnConfig defaults;
    defaults.input_dim = d.features->cols();
    defaults.output_dim = d.num_classes();
    const EdHnnConfig base = detail::edhnn_config_from_json(model_json, r.path_of("model"), defaults);
    try {
      base.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(r.path_of("model"), e.what());
    }
    ctx.resolved["dataset"] = dataset_path.string();
    ctx.resolved["epochs"] = epochs;
    ctx.resolved["model"] = detail::to_json(base);

    const std::vector<std::size_t> values = sweep.key.empty() ? std::vector<std::size_t>{0} : sweep.values;
    for (std::size_t v : values) {
      EdHnnConfig c = base;
      apply_sweep(sweep, v, c);
      ClassificationOptions opts{epochs, ctx.seed, adam};
      const ClassificationResult res = train_node_classification(d, c, opts);
      const std::string sfx = suffix(sweep, v);
      ctx.write("metrics" + sfx + ".csv", metrics_csv(res.history));
      ctx.write("checkpoint" + sfx + ".json", checkpoint_json(res.best_model));
      Json run{{"num_iterations", c.num_iterations},
               {"hidden_dim", c.hidden_dim},
               {"test_acc", res.test_acc},
               {"best_val_acc", res.best_val_acc},
               {"best_epoch", res.best_epoch},
               {"parameter_count", res.parameter_count}};
      *ctx.log << "L=" << c.num_iterations << " hidden=" << c.hidden_dim << " test_acc=" << res.test_acc << "\n";
      runs.push_back(std::move(run));
    }
    summary["test_acc"] = runs[0]["test_acc"];
  } else if (task == "regression") {
    const fs::path pairs_path = ctx.resolve(r.require<std::string>("pairs"));
    RegressionOptions opts;
    opts.epochs = r.get("epochs", opts.epochs);
    opts.batch_size = r.get("batch_size", opts.batch_size);
    opts.train_fraction = r.get("train_fraction", opts.train_fraction);
    opts.standardize = r.get("standardize", opts.standardize);
    opts.cosine_lr = r.get("cosine_lr", opts.cosine_lr);
    opts.adam = adam;
    opts.seed = ctx.seed;
    const bool shuffle_pairs = r.get("shuffle_pairs", false);
    const Json model_json = r.has("model") ? r.raw("model") : Json::object();
    r.finish();
    if (opts.batch_size < 1) throw ConfigError(r.path_of("batch_size"), "must be >= 1");
    if (!(opts.train_fraction > 0.0 && opts.train_fraction < 1.0))
      throw ConfigError(r.path_of("train_fraction"), "must be in (0, 1)");
    const EdHnnConfig base = detail::edhnn_config_from_json(model_json, r.path_of("model"), regression_defaults());
    try {
      base.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(r.path_of("model"), e.what());
    }
    ctx.resolved["pairs"] = pairs_path.string();
    ctx.resolved["epochs"] = opts.epochs;
    ctx.resolved["batch_size"] = opts.batch_size;
    ctx.resolved["train_fraction"] = opts.train_fraction;
    ctx.resolved["standardize"] = opts.standardize;
    ctx.resolved["cosine_lr"] = opts.cosine_lr;
    ctx.resolved["shuffle_pairs"] = shuffle_pairs;
    ctx.resolved["model"] = detail::to_json(base);

    DiffusionPairFile file;
    try {
      file = diffusion_pairs_from_json(read_text_file(pairs_path));
    } catch (const ParseError& e) {
      throw ParseError(pairs_path.string() + ":" + e.location(), e.detail());
    }
    fs::path hg_path(file.hypergraph_ref);
    if (hg_path.is_relative()) hg_path = pairs_path.parent_path() / hg_path;
    const Hypergraph h = load_dataset(hg_path).hypergraph;
    if (shuffle_pairs) {
      Rng rng(mix_seed(ctx.seed, kTagShuffledPairs));
      const auto perm = rng.permutation(file.pairs.size());
      std::vector<DiffusionPair> mixed;
      for (std::size_t i = 0; i < file.pairs.size(); ++i)
        mixed.push_back({file.pairs[i].h0, file.pairs[perm[i]].h1});
      file.pairs = std::move(mixed);
    }

    std::string mae_csv = "hidden_dim,heldout_mae,identity_mae,parameter_count\n";
    const std::vector<std::size_t> values = sweep.key.empty() ? std::vector<std::size_t>{0} : sweep.values;
    for (std::size_t v : values) {
      EdHnnConfig c = base;
      apply_sweep(sweep, v, c);
      const RegressionResult res = train_diffusion_regression(h, file.pairs, c, opts);
      const std::string sfx = suffix(sweep, v);
      std::string loss_csv = "epoch,loss\n";
      for (std::size_t e = 0; e < res.epoch_loss.size(); ++e)
        loss_csv += std::to_string(e + 1) + "," + format_real(res.epoch_loss[e]) + "\n";
      ctx.write("loss" + sfx + ".csv", loss_csv);
      ctx.write("checkpoint" + sfx + ".json", checkpoint_json(res.model));
      mae_csv += std::to_string(c.hidden_dim) + "," + format_real(res.heldout_mae) + "," +
                 format_real(res.identity_mae) + "," + std::to_string(res.parameter_count) + "\n";
      *ctx.log << "hidden=" << c.hidden_dim << " heldout_mae=" << res.heldout_mae
               << " identity_mae=" << res.identity_mae << "\n";
      runs.push_back({{"num_iterations", c.num_iterations},
                      {"hidden_dim", c.hidden_dim},
                      {"heldout_mae", res.heldout_mae},
                      {"identity_mae", res.identity_mae},
                      {"train_mae", res.train_mae},
                      {"parameter_count", res.parameter_count}});
    }
    ctx.write("mae.csv", mae_csv);
    summary["heldout_mae"] = runs[0]["heldout_mae"];
    summary["identity_mae"] = runs[0]["identity_mae"];
  } else {
    throw ConfigError(r.path_of("task"), "unknown task '" + task + "' (classification, regression)");
  }
  summary["runs"] = std::move(runs);
  ctx.write("summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int cmd_check(ObjectReader& r, Context& ctx) {
  CheckOptions opts;
  opts.seed = ctx.seed;
  opts.inject_tv_sign_fault = r.get("inject_fault", false);
  if (r.has("suites")) {
    const Json& s = r.raw("suites");
    if (!s.is_array()) throw ConfigError(r.path_of("suites"), "expected an array of suite names");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto name = ObjectReader::convert<std::string>(s[i], r.path_of("suites") + "/" + std::to_string(i));
      const auto all = check_suite_names();
      if (std::find(all.begin(), all.end(), name) == all.end())
        throw ConfigError(r.path_of("suites") + "/" + std::to_string(i), "unknown suite '" + name + "'");
      opts.suites.push_back(name);
    }
  }
  r.finish();
  ctx.resolved["inject_fault"] = opts.inject_tv_sign_fault;
  ctx.resolved["suites"] = opts.suites;

  const auto results = run_checks(opts);
  ctx.write("report.json", check_report_json(results, opts));
  Json failed = Json::array();
  for (const auto& s : results) {
    *ctx.log << (s.passed ? "PASS " : "FAIL ") << s.name << " max_residual=" << s.max_residual
             << " tolerance=" << s.tolerance << "\n";
    if (!s.passed) failed.push_back(s.name);
  }
  Json summary = summary_base("check");
  summary["passed"] = failed.empty();
  summary["failed_suites"] = failed;
  summary["num_suites"] = results.size();
  ctx.write("summary.json", summary.dump(2) + "\n");
  return failed.empty() ? kExitOk : kExitPropertyFailure;
}

}  // namespace

int run_command(const CommandRequest& request, std::ostream& log, std::ostream& err) {
  static const std::vector<std::string> commands = {"generate", "diffuse", "train", "check"};
  if (std::find(commands.begin(), commands.end(), request.command) == commands.end()) {
    err << "error: unknown command '" << request.command << "'\n";
    return kExitConfigError;
  }
  Context ctx;
  ctx.log = &log;
  Json doc;
  try {
    std::string text;
    try {
      text = read_text_file(request.config);
    } catch (const Error& e) {
      throw ConfigError("/", std::string("cannot read config: ") + e.what());
    }
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ConfigError("/", "invalid JSON at byte " + std::to_string(e.byte));
    }
    ctx.config_dir = fs::absolute(request.config).parent_path();
    ObjectReader r(doc, "/");
    ctx.seed = request.seed ? *request.seed : r.get<std::uint64_t>("seed", 0);
    if (request.seed) r.get<std::uint64_t>("seed", 0);
    if (request.out) {
      ctx.out = fs::absolute(*request.out).lexically_normal();
      if (r.has("out")) r.get<std::string>("out", "");
    } else if (r.has("out")) {
      ctx.out = ctx.resolve(r.require<std::string>("out"));
    } else {
      throw ConfigError("/out", "no output directory (set \"out\" or pass --out)");
    }
    ctx.resolved["seed"] = ctx.seed;
    ctx.resolved["out"] = ctx.out.string();

    int code = kExitOk;
    if (request.command == "generate") code = cmd_generate(r, ctx);
    else if (request.command == "diffuse") code = cmd_diffuse(r, ctx);
    else if (request.command == "train") code = cmd_train(r, ctx);
    else code = cmd_check(r, ctx);

    std::sort(ctx.outputs.begin(), ctx.outputs.end());
    Json manifest{{"command", request.command},
                  {"config", ctx.resolved},
                  {"seed", ctx.seed},
                  {"outputs", ctx.outputs},
                  {"format_version", 1}};
    write_text_file(ctx.out / "manifest.json", manifest.dump(2) + "\n");
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace hgdiff
