// Batch front end: reads a JSON run configuration, dispatches one
// subcommand, and writes deterministic CSV/JSON artifacts plus a manifest
// with per-output checksums. Exit codes: 0 success, 2 configuration error,
// 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pcecv/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;  // 0: use hardware concurrency
};

int effective_threads(const GlobalArgs& args) {
  if (args.threads > 0) return args.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

json load_config(const std::string& path) {
  if (!fs::exists(path))
    throw pcecv::ConfigError("config file '" + path + "' does not exist");
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw pcecv::ConfigError("cannot open config file '" + path + "'");
  try {
    json j;
    in >> j;
    if (!j.is_object())
      throw pcecv::ConfigError("config must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw pcecv::ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

void reject_unknown_keys(const json& cfg,
                         const std::vector<std::string>& allowed) {
  for (const auto& [key, value] : cfg.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw pcecv::ConfigError("unknown configuration key '" + key + "'");
  }
}

std::uint64_t resolve_seed(const json& cfg, const GlobalArgs& args) {
  if (args.seed_override) return *args.seed_override;
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_unsigned())
      throw pcecv::ConfigError("'seed' must be an unsigned integer");
    return cfg["seed"].get<std::uint64_t>();
  }
  throw pcecv::ConfigError(
      "a seed is required (config 'seed' or --seed; no wall-clock default)");
}

int require_int(const json& cfg, const char* key, int min_value) {
  if (!cfg.contains(key))
    throw pcecv::ConfigError(std::string("missing required key '") + key +
                             "'");
  if (!cfg[key].is_number_integer())
    throw pcecv::ConfigError(std::string("'") + key + "' must be an integer");
  const int v = cfg[key].get<int>();
  if (v < min_value)
    throw pcecv::ConfigError(std::string("'") + key + "' must be >= " +
                             std::to_string(min_value));
  return v;
}

pcecv::TrainConfig train_config_from(const json& cfg, std::uint64_t seed) {
  pcecv::TrainConfig out;
  out.seed = seed;
  if (cfg.contains("selector")) {
    const std::string s = cfg["selector"].get<std::string>();
    if (s == "omp") {
      out.selector = pcecv::Selector::Omp;
    } else if (s == "lars") {
      out.selector = pcecv::Selector::Lars;
    } else if (s == "full") {
      out.selector = pcecv::Selector::Full;
    } else {
      throw pcecv::ConfigError("unknown selector '" + s + "'");
    }
  }
  if (cfg.contains("p_max")) out.p_max = require_int(cfg, "p_max", 1);
  if (cfg.contains("error_metric")) {
    const std::string m = cfg["error_metric"].get<std::string>();
    if (m == "loo") {
      out.error_metric = pcecv::ErrorMetric::Loo;
    } else if (m == "corrected_loo") {
      out.error_metric = pcecv::ErrorMetric::CorrectedLoo;
    } else {
      throw pcecv::ConfigError("unknown error_metric '" + m + "'");
    }
  }
  return out;
}

// Training data either from a named benchmark or from a design CSV with a
// declared input space.
struct ResolvedProblem {
  pcecv::ExperimentalDesign design;
  pcecv::InputSpace space;
};

ResolvedProblem resolve_problem(const json& cfg, std::uint64_t seed) {
  const bool has_problem = cfg.contains("problem");
  const bool has_data = cfg.contains("data");
  if (has_problem == has_data)
    throw pcecv::ConfigError(
        "exactly one of 'problem' or 'data' must be given");

  ResolvedProblem out;
  if (has_problem) {
    const auto bench =
        pcecv::make_benchmark(cfg["problem"].get<std::string>());
    const int n = require_int(cfg, "n", 3);
    out.design = bench.sample(n, seed);
    out.space = bench.space;
    return out;
  }
  const std::string data = cfg["data"].get<std::string>();
  if (!fs::exists(data))
    throw pcecv::ConfigError("data file '" + data + "' does not exist");
  if (!cfg.contains("input_space"))
    throw pcecv::ConfigError("'data' runs require an 'input_space'");
  try {
    out.space = pcecv::space_from_json(cfg["input_space"]);
  } catch (const pcecv::DataError& e) {
    throw pcecv::ConfigError(std::string("invalid input_space: ") + e.what());
  }
  const auto loaded = pcecv::read_design_csv(data);
  if (loaded.design.inputs.cols() !=
      static_cast<Eigen::Index>(out.space.dimension()))
    throw pcecv::ConfigError(
        "input_space dimension does not match the data columns");
  out.design = loaded.design;
  return out;
}

std::vector<std::string> variable_names(const pcecv::InputSpace& space) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < space.marginals.size(); ++i) {
    const std::string& n = space.marginals[i].name;
    names.push_back(n.empty() ? "x" + std::to_string(i) : n);
  }
  return names;
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw pcecv::DataError("cannot open '" + path.string() +
                           "' for writing");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out)
    throw pcecv::DataError("write failure on '" + path.string() + "'");
}

void finish_run(const GlobalArgs& args, std::uint64_t seed,
                const std::vector<std::string>& outputs) {
  const std::uint64_t config_hash = pcecv::fnv1a64_file(args.config_path);
  pcecv::write_manifest(args.out_dir, seed, config_hash, outputs);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void cmd_train(const GlobalArgs& args) {
  const json cfg = load_config(args.config_path);
  reject_unknown_keys(cfg, {"problem", "n", "data", "input_space", "selector",
                            "p_max", "error_metric", "seed"});
  const std::uint64_t seed = resolve_seed(cfg, args);
  const pcecv::TrainConfig tc = train_config_from(cfg, seed);
  const ResolvedProblem problem = resolve_problem(cfg, seed);

  const pcecv::SparsePceModel model =
      pcecv::train(problem.design, problem.space, tc);
  pcecv::save_model(model, fs::path(args.out_dir) / "model.json");

  int nonzero = 0;
  for (Eigen::Index k = 0; k < model.coefficients.size(); ++k)
    if (model.coefficients[k] != 0.0) ++nonzero;

  json degree_errors = json::array();
  for (const auto& [p, e] : model.diagnostics.degree_errors)
    degree_errors.push_back({p, e});
  const json diagnostics{
      {"p_chosen", model.diagnostics.p_chosen},
      {"n_terms", model.diagnostics.n_terms},
      {"nonzero_count", nonzero},
      {"epsilon_icv", pcecv::detail::json_number(model.diagnostics.epsilon_icv)},
      {"loo", pcecv::detail::json_number(model.diagnostics.loo)},
      {"selection_error",
       pcecv::detail::json_number(model.diagnostics.selection_error)},
      {"q2_icv", pcecv::detail::json_number(model.diagnostics.q2_icv)},
      {"r2_train", pcecv::detail::json_number(model.diagnostics.r2_train)},
      {"response_variance",
       pcecv::detail::json_number(model.diagnostics.response_variance)},
      {"degree_errors", std::move(degree_errors)},
      {"selector", pcecv::to_string(tc.selector)},
      {"error_metric", pcecv::to_string(tc.error_metric)},
      {"n_train", problem.design.inputs.rows()},
      {"seed", seed}};
  write_json_file(diagnostics, fs::path(args.out_dir) / "diagnostics.json");
  finish_run(args, seed, {"model.json", "diagnostics.json"});
}

void cmd_replicate(const GlobalArgs& args) {
  const json cfg = load_config(args.config_path);
  reject_unknown_keys(cfg, {"problem", "sizes", "n_rep", "n_test", "selector",
                            "p_max", "error_metric", "seed", "compute_ocv"});
  const std::uint64_t seed = resolve_seed(cfg, args);
  if (!cfg.contains("problem"))
    throw pcecv::ConfigError("missing required key 'problem'");
  if (!cfg.contains("sizes") || !cfg["sizes"].is_array() ||
      cfg["sizes"].empty())
    throw pcecv::ConfigError("'sizes' must be a non-empty integer array");
  std::vector<int> sizes;
  for (const auto& v : cfg["sizes"]) {
    if (!v.is_number_integer())
      throw pcecv::ConfigError("'sizes' must contain only integers");
    sizes.push_back(v.get<int>());
  }
  std::sort(sizes.begin(), sizes.end());

  const int n_rep = require_int(cfg, "n_rep", 1);
  const int n_test = require_int(cfg, "n_test", 2);
  pcecv::StudyOptions opts;
  opts.threads = effective_threads(args);
  if (cfg.contains("compute_ocv")) {
    if (!cfg["compute_ocv"].is_boolean())
      throw pcecv::ConfigError("'compute_ocv' must be a boolean");
    opts.compute_ocv = cfg["compute_ocv"].get<bool>();
  }

  const pcecv::ReplicationTable table = pcecv::replication_study(
      cfg["problem"].get<std::string>(), sizes, n_rep,
      train_config_from(cfg, seed), n_test, seed, opts);
  pcecv::write_replication_csv(table,
                               fs::path(args.out_dir) / "replication.csv");
  finish_run(args, seed, {"replication.csv"});
}

void cmd_ocv(const GlobalArgs& args) {
  const json cfg = load_config(args.config_path);
  reject_unknown_keys(cfg, {"problem", "n", "data", "input_space", "selector",
                            "p_max", "error_metric", "seed"});
  const std::uint64_t seed = resolve_seed(cfg, args);
  const ResolvedProblem problem = resolve_problem(cfg, seed);
  const pcecv::OcvReport report =
      pcecv::outer_loocv(problem.design, problem.space,
                         train_config_from(cfg, seed),
                         effective_threads(args));
  pcecv::write_ocv_csv(report, fs::path(args.out_dir) / "ocv.csv");
  const json summary{
      {"n", report.per_fold.size()},
      {"epsilon_ocv", pcecv::detail::json_number(report.epsilon_ocv)},
      {"q2_ocv", pcecv::detail::json_number(report.q2_ocv)},
      {"variance_reference",
       pcecv::detail::json_number(report.variance_reference)},
      {"failed_folds", report.failed_folds}};
  write_json_file(summary, fs::path(args.out_dir) / "ocv.json");
  finish_run(args, seed, {"ocv.csv", "ocv.json"});
}

void cmd_sobol(const GlobalArgs& args) {
  const json cfg = load_config(args.config_path);
  reject_unknown_keys(cfg, {"model", "seed"});
  if (!cfg.contains("model"))
    throw pcecv::ConfigError("missing required key 'model'");
  const std::string model_path = cfg["model"].get<std::string>();
  if (!fs::exists(model_path))
    throw pcecv::ConfigError("model file '" + model_path +
                             "' does not exist");
  const pcecv::SparsePceModel model = pcecv::load_model(model_path);
  const pcecv::SobolIndices s = pcecv::sobol_indices(model);
  pcecv::write_sensitivity_csv(s, variable_names(model.input_space),
                               fs::path(args.out_dir) / "sensitivity.csv");
  finish_run(args, model.seed, {"sensitivity.csv"});
}

void cmd_preprocess(const GlobalArgs& args) {
  const json cfg = load_config(args.config_path);
  reject_unknown_keys(cfg, {"scenario", "mode"});
  if (!cfg.contains("scenario") || !cfg.contains("mode"))
    throw pcecv::ConfigError("preprocess needs 'scenario' and 'mode'");
  const std::string scenario_path = cfg["scenario"].get<std::string>();
  if (!fs::exists(scenario_path))
    throw pcecv::ConfigError("scenario file '" + scenario_path +
                             "' does not exist");
  const pcecv::ReduceMode mode =
      pcecv::reduce_mode_from(cfg["mode"].get<std::string>());
  if (mode == pcecv::ReduceMode::Six)
    throw pcecv::ConfigError("preprocess emits reduced designs: mode must "
                             "be 'four' or 'two'");

  const pcecv::ScenarioSet set = pcecv::read_scenario_csv(scenario_path);
  const pcecv::ExperimentalDesign reduced = pcecv::reduce_inputs(set, mode);
  const std::vector<std::string> names =
      mode == pcecv::ReduceMode::Four
          ? std::vector<std::string>{"r", "psi", "theta_s", "z"}
          : std::vector<std::string>{"r", "z"};
  pcecv::write_design_csv(reduced, names,
                          fs::path(args.out_dir) / "reduced.csv");
  finish_run(args, 0, {"reduced.csv"});
}

void cmd_benchmark_eval(const GlobalArgs& args) {
  const json cfg = load_config(args.config_path);
  reject_unknown_keys(cfg, {"problem", "n", "seed", "emit"});
  const std::uint64_t seed = resolve_seed(cfg, args);
  if (!cfg.contains("problem"))
    throw pcecv::ConfigError("missing required key 'problem'");
  const std::string problem = cfg["problem"].get<std::string>();
  const int n = require_int(cfg, "n", 1);
  const std::string emit = cfg.value("emit", std::string("design"));

  if (emit == "scenarios") {
    if (problem != "sar-synthetic")
      throw pcecv::ConfigError(
          "emit=scenarios is only available for problem 'sar-synthetic'");
    pcecv::write_scenario_csv(pcecv::generate_scenarios(n, seed),
                              fs::path(args.out_dir) / "scenarios.csv");
    finish_run(args, seed, {"scenarios.csv"});
    return;
  }
  if (emit != "design")
    throw pcecv::ConfigError("'emit' must be 'design' or 'scenarios'");
  const auto bench = pcecv::make_benchmark(problem);
  pcecv::write_design_csv(bench.sample(n, seed), variable_names(bench.space),
                          fs::path(args.out_dir) / "design.csv");
  finish_run(args, seed, {"design.csv"});
}

int run_command(const std::string& name, const GlobalArgs& args) {
  try {
    fs::create_directories(args.out_dir);
    if (name == "train") {
      cmd_train(args);
    } else if (name == "replicate") {
      cmd_replicate(args);
    } else if (name == "ocv") {
      cmd_ocv(args);
    } else if (name == "sobol") {
      cmd_sobol(args);
    } else if (name == "preprocess") {
      cmd_preprocess(args);
    } else {
      cmd_benchmark_eval(args);
    }
    return 0;
  } catch (const pcecv::Error& e) {
    int code = 4;
    const char* type = "numerical";
    if (dynamic_cast<const pcecv::ConfigError*>(&e) != nullptr) {
      code = 2;
      type = "config";
    } else if (dynamic_cast<const pcecv::DataError*>(&e) != nullptr) {
      code = 3;
      type = "data";
    }
    const json err{{"error",
                    {{"code", code}, {"type", type}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return code;
  } catch (const std::exception& e) {
    const json err{{"error",
                    {{"code", 4},
                     {"type", "internal"},
                     {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sparse polynomial chaos surrogates with cross-model validation"};
  app.require_subcommand(1);

  GlobalArgs args;
  std::string chosen;
  const auto add_subcommand = [&](const std::string& name,
                                  const std::string& description) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", args.config_path, "run configuration (JSON)")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory")->required();
    sub->add_option("--seed", args.seed_override,
                    "seed override (takes precedence over the config)");
    sub->add_option("--threads", args.threads,
                    "worker threads (default: available cores)")
        ->check(CLI::PositiveNumber);
    sub->callback([&chosen, name] { chosen = name; });
    return sub;
  };

  add_subcommand("train", "fit a sparse expansion and write the model");
  add_subcommand("replicate", "repeated-design Q2 study across sizes");
  add_subcommand("ocv", "outer leave-one-out cross validation");
  add_subcommand("sobol", "surrogate Sobol indices of a saved model");
  add_subcommand("preprocess", "reduce scenario poses to local coordinates");
  add_subcommand("benchmark-eval", "sample a benchmark design to CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run_command(chosen, args);
}
