/*
 * Copyright 2026 The treeshap-hd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// treeshap-hd: exact tree-ensemble attributions from the command line.
//
//   treeshap-hd explain  --model m.json --data x.csv --background b.csv --output phi.csv
//   treeshap-hd validate --max-depth 6 --trials 50 --seed 1
//   treeshap-hd bench    --depths 8,10,12 --method both --output report.json
//
// Exit codes: 0 success, 1 validation breach, 2 bad input, 3 budget or depth cap.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"
#include "treeshap_hd/bench.hpp"
#include "treeshap_hd/engine.hpp"
#include "treeshap_hd/errors.hpp"
#include "treeshap_hd/synth.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace {

using namespace treeshap_hd;

constexpr int kExitBreach = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;
constexpr double kValidateTolerance = 1e-8;

struct CommonOptions {
  int threads = 1;
  std::string memory_budget;
  int depth_cap = kDefaultDepthCap;
  std::size_t chunk_rows = kDefaultChunkRows;
  std::string mode = "background";
  std::string values = "shapley";
};

struct ExplainOptions {
  std::string model_path;
  std::string model_format = "canonical";
  std::string data_path;
  std::string background_path;
  std::string output_path;
  std::uint64_t seed = 1;  // explain draws no random numbers
};

struct ValidateOptions {
  int max_depth = 6;
  int trials = 50;
  std::uint64_t seed = 1;
  bool corrupt_cache = false;
};

struct BenchOptions {
  std::vector<int> depths{6, 8, 10};
  std::string method = "hd";
  std::size_t leaves = 4;
  int trials = 15;
  std::uint64_t seed = 1;
  std::size_t consumer_rows = 16;
  std::size_t background_rows = 16;
  double min_seconds = 0.0;
  std::string output_path;
};

// Accepts a byte count with an optional K, M or G suffix (powers of 1024).
std::size_t parse_bytes(const std::string& text) {
  if (text.empty()) return std::numeric_limits<std::size_t>::max();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse memory budget '" + text + "'");
  }
  std::string suffix = text.substr(pos);
  std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (suffix == "K" || suffix == "KB") v *= 1024.0;
  else if (suffix == "M" || suffix == "MB") v *= 1024.0 * 1024.0;
  else if (suffix == "G" || suffix == "GB") v *= 1024.0 * 1024.0 * 1024.0;
  else if (!suffix.empty() && suffix != "B") {
    throw ValidationError("unknown memory budget suffix '" + suffix + "'");
  }
  if (!(v >= 0.0) || v >= 1.8e19) throw ValidationError("memory budget out of range");
  return static_cast<std::size_t>(v);
}

ExplainMode parse_mode(const std::string& s) {
  return s == "path-dependent" ? ExplainMode::kPathDependent : ExplainMode::kBackground;
}

Functional parse_values(const std::string& s) {
  if (s == "banzhaf") return Functional::kBanzhaf;
  if (s == "interaction") return Functional::kShapleyInteraction;
  return Functional::kShapley;
}

EngineOptions engine_options(const CommonOptions& c) {
  EngineOptions o;
  o.threads = c.threads;
  o.memory_budget_bytes = parse_bytes(c.memory_budget);
  o.depth_cap = c.depth_cap;
  o.chunk_rows = c.chunk_rows;
  return o;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_header(const EnsembleModel& model, const Dataset& data, const std::string& what) {
  const auto& names = model.feature_names();
  if (names.empty() || data.column_names().empty()) return;
  if (names != data.column_names()) {
    std::string got;
    for (const auto& n : data.column_names()) got += (got.empty() ? "" : ",") + n;
    throw ValidationError(what + " header '" + got + "' does not match the model feature names");
  }
}

int cmd_explain(const ExplainOptions& e, const CommonOptions& c) {
  const EnsembleModel model = e.model_format != "canonical" ? load_lightgbm_text(e.model_path)
                                                           : load_canonical(e.model_path);
  spdlog::info("model: {} trees, {} features, max depth {}", model.trees().size(),
               model.n_features(), model.max_path_depth());
  const Dataset consumers = read_csv(e.data_path);
  check_header(model, consumers, "data");
  const ExplainMode mode = parse_mode(c.mode);
  Dataset background;
  if (mode == ExplainMode::kBackground) {
    if (e.background_path.empty()) {
      throw ValidationError("background mode needs --background");
    }
    background = read_csv(e.background_path);
    check_header(model, background, "background");
  }
  const ExplainRequest request{model, consumers,
                               mode == ExplainMode::kBackground ? &background : nullptr, mode,
                               parse_values(c.values)};
  const AttributionResult r = explain(request, engine_options(c));
  spdlog::info("explained {} rows over {} leaves; {} adds, {} muls", r.rows, r.stats.leaves,
               r.stats.ops.adds, r.stats.ops.muls);

  std::vector<std::string> names = model.feature_names();
  if (names.empty()) names = consumers.column_names();
  std::ostringstream header;
  header << "row_id,base_value";
  if (r.interaction()) {
    for (std::size_t i = 0; i < r.features; ++i) {
      for (std::size_t j = 0; j < r.features; ++j) header << ",phi_" << i << '_' << j;
    }
  } else {
    for (const auto& n : names) header << ',' << n;
  }

  std::ofstream file;
  if (!e.output_path.empty()) {
    file.open(e.output_path);
    if (!file) throw ValidationError("cannot write " + e.output_path);
  }
  std::ostream& out = e.output_path.empty() ? std::cout : file;
  out << header.str() << '\n';
  const std::string base = format_double(r.base_value);
  for (std::size_t row = 0; row < r.rows; ++row) {
    out << row << ',' << base;
    for (double v : r.row(row)) out << ',' << format_double(v);
    out << '\n';
  }
  out.flush();
  if (!out) throw ValidationError("write failed");
  return 0;
}

double max_deviation(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct PairStat {
  std::string name;
  double max_dev = 0.0;
};

int cmd_validate(const ValidateOptions& v, const CommonOptions& c, bool mode_set,
                 bool values_set) {
  if (v.trials <= 0) {
    throw ValidationError("nothing to validate: --trials must be positive");
  }
  if (v.max_depth < 1 || v.max_depth > 8) {
    throw ValidationError("--max-depth must be in [1, 8]");
  }
  std::vector<ExplainMode> modes{ExplainMode::kBackground, ExplainMode::kPathDependent};
  if (mode_set) modes = {parse_mode(c.mode)};
  std::vector<Functional> functionals{Functional::kShapley, Functional::kBanzhaf,
                                      Functional::kShapleyInteraction};
  if (values_set) functionals = {parse_values(c.values)};
  const EngineOptions opt = engine_options(c);

  std::vector<PairStat> stats;
  auto stat = [&](const std::string& name) -> double& {
    for (auto& s : stats) {
      if (s.name == name) return s.max_dev;
    }
    stats.push_back({name, 0.0});
    return stats.back().max_dev;
  };

  for (int t = 0; t < v.trials; ++t) {
    const std::uint64_t seed = v.seed + static_cast<std::uint64_t>(t);
    std::mt19937_64 rng(seed);
    RandomTreeSpec spec;
    spec.max_depth = std::uniform_int_distribution<int>(1, v.max_depth)(rng);
    spec.n_features = std::uniform_int_distribution<int>(2, 12)(rng);
    spec.leaf_probability = 0.2;
    spec.repeated_features = true;
    spec.covers = true;
    const int n_trees = std::uniform_int_distribution<int>(1, 3)(rng);
    const double base_score = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const EnsembleModel model = random_model(rng, n_trees, spec, base_score);
    const auto cols = static_cast<std::size_t>(spec.n_features);
    const Dataset consumers =
        random_dataset(rng, std::uniform_int_distribution<std::size_t>(1, 16)(rng), cols);
    const Dataset background =
        random_dataset(rng, std::uniform_int_distribution<std::size_t>(1, 32)(rng), cols);

    double trial_dev = 0.0;
    for (Functional fn : functionals) {
      CacheSet caches = build_caches(std::max(model.max_unique_features(), 1), fn);
      if (v.corrupt_cache) {
        for (double& x : caches.main.mutable_data()) x *= 1.001;
        for (double& x : caches.pairs.mutable_data()) x *= 1.001;
      }
      for (ExplainMode mode : modes) {
        const ExplainRequest req{model, consumers, &background, mode, fn};
        const AttributionResult hd = explain(req, opt, &caches);
        const AttributionResult dense = explain_dense_baseline(req, opt);
        const std::string tag = std::string(mode_name(mode)) + "/" + functional_name(fn);
        double& dense_dev = stat(tag + " hd vs dense_baseline");
        const double d0 = std::max(max_deviation(hd.values, dense.values),
                                   std::abs(hd.base_value - dense.base_value));
        dense_dev = std::max(dense_dev, d0);
        trial_dev = std::max(trial_dev, d0);
        double& oracle_dev = stat(tag + " hd vs bruteforce");
        for (std::size_t r = 0; r < consumers.rows(); ++r) {
          const OracleResult o = mode == ExplainMode::kBackground
                                     ? background_shap_bruteforce(model, consumers.row(r),
                                                                  background, fn)
                                     : path_dependent_bruteforce(model, consumers.row(r), fn);
          const double d = std::max(max_deviation(hd.row(r), o.values),
                                    std::abs(hd.base_value - o.base_value));
          oracle_dev = std::max(oracle_dev, d);
          trial_dev = std::max(trial_dev, d);
        }
      }
    }
    spdlog::debug("seed {}: max deviation {:.3g}", seed, trial_dev);
    if (!(trial_dev <= kValidateTolerance)) {
      for (const auto& s : stats) std::printf("%-48s max_abs_dev %.3e\n", s.name.c_str(), s.max_dev);
      std::printf("FAIL seed=%llu max_abs_dev=%.3e tolerance=%.0e\n",
                  static_cast<unsigned long long>(seed), trial_dev, kValidateTolerance);
      return kExitBreach;
    }
  }
  double overall = 0.0;
  for (const auto& s : stats) {
    std::printf("%-48s max_abs_dev %.3e\n", s.name.c_str(), s.max_dev);
    overall = std::max(overall, s.max_dev);
  }
  std::printf("PASS trials=%d seeds=%llu..%llu max_abs_dev=%.3e tolerance=%.0e\n", v.trials,
              static_cast<unsigned long long>(v.seed),
              static_cast<unsigned long long>(v.seed + static_cast<std::uint64_t>(v.trials) - 1),
              overall, kValidateTolerance);
  return 0;
}

int cmd_bench(const BenchOptions& b, const CommonOptions& c) {
  BenchConfig cfg;
  cfg.depths = b.depths;
  std::sort(cfg.depths.begin(), cfg.depths.end());
  cfg.depths.erase(std::unique(cfg.depths.begin(), cfg.depths.end()), cfg.depths.end());
  if (b.method == "hd") cfg.methods = {BenchMethod::kHd};
  else if (b.method == "dense") cfg.methods = {BenchMethod::kDense};
  else cfg.methods = {BenchMethod::kHd, BenchMethod::kDense};
  cfg.mode = parse_mode(c.mode);
  cfg.functional = parse_values(c.values);
  cfg.seed = b.seed;
  cfg.consumer_rows = b.consumer_rows;
  cfg.background_rows = b.background_rows;
  cfg.leaves = b.leaves;
  cfg.trials = b.trials;
  cfg.min_seconds_per_leaf = b.min_seconds;
  cfg.memory_budget_bytes = parse_bytes(c.memory_budget);
  cfg.depth_cap = c.depth_cap;
  const BenchReport report = run_bench(cfg);
  if (!b.output_path.empty()) {
    std::ofstream out(b.output_path);
    if (!out) throw ValidationError("cannot write " + b.output_path);
    out << report.to_json() << '\n';
  }
  std::cout << report.summary_table();
  return 0;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("treeshap-hd");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TREESHAP_HD_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Exact Shapley, Banzhaf and interaction values for decision-tree ensembles"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_engine_flags = [&](CLI::App* sub) {
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--memory-budget", common.memory_budget,
                    "Byte budget, optional K/M/G suffix");
    sub->add_option("--depth-cap", common.depth_cap, "Maximum unique features per path")
        ->check(CLI::Range(1, kMaxDepthCap));
  };
  auto add_mode_flags = [&](CLI::App* sub) {
    auto* mode = sub->add_option("--mode", common.mode, "Value function")
                     ->check(CLI::IsMember({"background", "path-dependent"}));
    auto* values = sub->add_option("--values", common.values, "Attribution functional")
                       ->check(CLI::IsMember({"shapley", "banzhaf", "interaction"}));
    return std::pair{mode, values};
  };

  ExplainOptions ex;
  auto* explain_cmd = app.add_subcommand("explain", "Explain every row of a CSV file");
  explain_cmd->add_option("--model", ex.model_path, "Model file")->required();
  explain_cmd->add_option("--model-format", ex.model_format, "Model file format")
      ->check(CLI::IsMember({"canonical", "lightgbm", "lightgbm_text"}));
  explain_cmd->add_option("--data", ex.data_path, "Rows to explain (CSV with header)")
      ->required();
  explain_cmd->add_option("--background", ex.background_path, "Background rows (CSV)");
  explain_cmd->add_option("--output", ex.output_path, "Output CSV (default stdout)");
  explain_cmd->add_option("--chunk-rows", common.chunk_rows, "Rows per pattern chunk")
      ->check(CLI::PositiveNumber);
  explain_cmd->add_option("--seed", ex.seed, "Accepted for flag parity; output does not depend on it");
  add_engine_flags(explain_cmd);
  add_mode_flags(explain_cmd);

  ValidateOptions va;
  auto* validate_cmd = app.add_subcommand("validate", "Compare explain against the oracles");
  validate_cmd->add_option("--max-depth", va.max_depth, "Largest random tree depth (<= 8)");
  validate_cmd->add_option("--trials", va.trials, "Random models to check");
  validate_cmd->add_option("--seed", va.seed, "First seed");
  validate_cmd->add_flag("--corrupt-cache", va.corrupt_cache,
                         "Perturb the diagonal cache (fault injection)");
  add_engine_flags(validate_cmd);
  auto [validate_mode, validate_values] = add_mode_flags(validate_cmd);

  BenchOptions be;
  auto* bench_cmd = app.add_subcommand("bench", "Time the per-leaf pipeline by tree depth");
  bench_cmd->add_option("--depths", be.depths, "Comma separated depths")->delimiter(',');
  bench_cmd->add_option("--method", be.method, "Pipeline to time")
      ->check(CLI::IsMember({"hd", "dense", "both"}));
  bench_cmd->add_option("--leaves", be.leaves, "Leaves timed per depth")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--trials", be.trials, "Timing rounds over all depths")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", be.seed, "Synthetic model seed");
  bench_cmd->add_option("--rows", be.consumer_rows, "Consumer rows");
  bench_cmd->add_option("--background-rows", be.background_rows, "Background rows");
  bench_cmd->add_option("--min-seconds", be.min_seconds, "Minimum timed seconds per leaf");
  bench_cmd->add_option("--output", be.output_path, "JSON report path");
  add_engine_flags(bench_cmd);
  add_mode_flags(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (explain_cmd->parsed()) return cmd_explain(ex, common);
    if (validate_cmd->parsed()) {
      return cmd_validate(va, common, validate_mode->count() > 0, validate_values->count() > 0);
    }
    return cmd_bench(be, common);
  } catch (const BudgetFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBudget;
  } catch (const ValidationFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "error: out of memory\n");
    return kExitBudget;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
}
