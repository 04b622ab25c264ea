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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>
#include <vector>

#include "treeshap_hd/bench.hpp"
#include "treeshap_hd/cube.hpp"
#include "treeshap_hd/diagonal_cache.hpp"
#include "treeshap_hd/engine.hpp"
#include "treeshap_hd/errors.hpp"
#include "treeshap_hd/fast_mult.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace py = pybind11;
namespace ts = treeshap_hd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ts::Functional parse_functional(const std::string& name) {
  if (name == "shapley") return ts::Functional::kShapley;
  if (name == "banzhaf") return ts::Functional::kBanzhaf;
  if (name == "shapley_interaction" || name == "interaction") {
    return ts::Functional::kShapleyInteraction;
  }
  throw ts::ValidationError("unknown functional '" + name + "'");
}

ts::ExplainMode parse_mode(const std::string& name) {
  if (name == "background") return ts::ExplainMode::kBackground;
  if (name == "path_dependent") return ts::ExplainMode::kPathDependent;
  throw ts::ValidationError("unknown mode '" + name + "'");
}

ts::Dataset to_dataset(const Array& a, std::vector<std::string> names = {}) {
  if (a.ndim() != 2) throw ts::ValidationError("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<double> values(a.data(), a.data() + rows * cols);
  return ts::Dataset(rows, cols, std::move(values), std::move(names));
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw ts::ValidationError("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

Array from_vector(const std::vector<double>& v, std::vector<py::ssize_t> shape) {
  Array out(shape);
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::dict stats_dict(const ts::ExplainStats& s) {
  py::dict d;
  d["leaves"] = s.leaves;
  d["adds"] = s.ops.adds;
  d["muls"] = s.ops.muls;
  d["cache_bytes"] = s.cache_bytes;
  d["peak_workspace_bytes"] = s.peak_workspace_bytes;
  d["peak_pattern_vectors"] = s.peak_pattern_vectors;
  d["cube_entries"] = s.cube_entries;
  return d;
}

py::dict result_dict(const ts::AttributionResult& r) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(r.rows),
                                 static_cast<py::ssize_t>(r.features)};
  if (r.interaction()) shape.push_back(static_cast<py::ssize_t>(r.features));
  py::dict d;
  d["values"] = from_vector(r.values, shape);
  d["base_value"] = r.base_value;
  d["functional"] = ts::functional_name(r.functional);
  d["stats"] = stats_dict(r.stats);
  return d;
}

py::dict run_explain(bool dense, const ts::EnsembleModel& model, const Array& x,
                     const py::object& background, const std::string& mode,
                     const std::string& functional, int threads, std::size_t memory_budget,
                     int depth_cap, std::size_t chunk_rows) {
  const ts::Dataset consumers = to_dataset(x);
  ts::Dataset bg;
  const ts::ExplainMode m = parse_mode(mode);
  if (!background.is_none()) bg = to_dataset(background.cast<Array>());
  ts::ExplainRequest request{model, consumers, background.is_none() ? nullptr : &bg, m,
                             parse_functional(functional)};
  ts::EngineOptions options;
  options.threads = threads;
  if (memory_budget > 0) options.memory_budget_bytes = memory_budget;
  options.depth_cap = depth_cap;
  options.chunk_rows = chunk_rows;
  ts::AttributionResult result;
  {
    py::gil_scoped_release release;
    result = dense ? ts::explain_dense_baseline(request, options) : ts::explain(request, options);
  }
  return result_dict(result);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact Shapley, Banzhaf and interaction values for tree ensembles.";

  auto error = py::register_exception<ts::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ts::ValidationFailure>(m, "ValidationFailure", error.ptr());
  py::register_exception<ts::BudgetFailure>(m, "BudgetFailure", error.ptr());

  py::class_<ts::EnsembleModel>(m, "Model")
      .def_property_readonly("n_features", &ts::EnsembleModel::n_features)
      .def_property_readonly("base_score", &ts::EnsembleModel::base_score)
      .def_property_readonly("feature_names", &ts::EnsembleModel::feature_names)
      .def_property_readonly("n_trees", [](const ts::EnsembleModel& model) {
        return model.trees().size();
      })
      .def_property_readonly("max_path_depth", &ts::EnsembleModel::max_path_depth)
      .def_property_readonly("max_unique_features", &ts::EnsembleModel::max_unique_features)
      .def("active_features", &ts::EnsembleModel::active_features)
      .def("predict",
           [](const ts::EnsembleModel& model, const Array& x) {
             const auto out = ts::predict(model, to_dataset(x));
             return from_vector(out, {static_cast<py::ssize_t>(out.size())});
           },
           py::arg("x"))
      .def("to_json", &ts::dump_canonical)
      .def("save", &ts::save_canonical, py::arg("path"));

  m.def("load_model", &ts::load_canonical, py::arg("path"),
        "Load a model from a canonical JSON file.");
  m.def("parse_model", &ts::parse_canonical, py::arg("text"));
  m.def("load_lightgbm", &ts::load_lightgbm_text, py::arg("path"),
        "Load a LightGBM text model dump.");
  m.def("parse_lightgbm", &ts::parse_lightgbm_text, py::arg("text"));

  const auto explain_doc =
      "Attributions for every row of x. Returns a dict with 'values' (rows x features, or\n"
      "rows x features x features for interactions), 'base_value', 'functional' and 'stats'.\n"
      "memory_budget=0 means unlimited.";
  m.def("explain",
        [](const ts::EnsembleModel& model, const Array& x, const py::object& background,
           const std::string& mode, const std::string& functional, int threads,
           std::size_t memory_budget, int depth_cap, std::size_t chunk_rows) {
          return run_explain(false, model, x, background, mode, functional, threads,
                             memory_budget, depth_cap, chunk_rows);
        },
        py::arg("model"), py::arg("x"), py::arg("background") = py::none(),
        py::arg("mode") = "background", py::arg("functional") = "shapley",
        py::arg("threads") = 1, py::arg("memory_budget") = 0,
        py::arg("depth_cap") = ts::kDefaultDepthCap,
        py::arg("chunk_rows") = ts::kDefaultChunkRows, explain_doc);
  m.def("explain_dense",
        [](const ts::EnsembleModel& model, const Array& x, const py::object& background,
           const std::string& mode, const std::string& functional) {
          return run_explain(true, model, x, background, mode, functional, 1, 0,
                             ts::kDefaultDepthCap, ts::kDefaultChunkRows);
        },
        py::arg("model"), py::arg("x"), py::arg("background") = py::none(),
        py::arg("mode") = "background", py::arg("functional") = "shapley",
        "Reference implementation that materialises every cube; paths up to 12 features.");

  m.def("bruteforce",
        [](const ts::EnsembleModel& model, const Array& row, const py::object& background,
           const std::string& functional) {
          const auto x = to_vector(row);
          const ts::Functional f = parse_functional(functional);
          ts::OracleResult r;
          if (background.is_none()) {
            r = ts::path_dependent_bruteforce(model, x, f);
          } else {
            r = ts::background_shap_bruteforce(model, x, to_dataset(background.cast<Array>()), f);
          }
          const auto n = static_cast<py::ssize_t>(model.n_features());
          std::vector<py::ssize_t> shape{n};
          if (f == ts::Functional::kShapleyInteraction) shape.push_back(n);
          return py::make_tuple(from_vector(r.values, shape), r.base_value);
        },
        py::arg("model"), py::arg("row"), py::arg("background") = py::none(),
        py::arg("functional") = "shapley",
        "Enumerates every coalition of active features for one row. Without a background the\n"
        "path-dependent game is used. Returns (values, v(empty set)).");

  m.def("strassen_like_mult",
        [](const Array& diag, const Array& f) {
          const auto d = to_vector(diag);
          const auto v = to_vector(f);
          ts::OpCounts ops;
          const auto out = ts::strassen_like_mult(d, v, &ops);
          return py::make_tuple(from_vector(out, {static_cast<py::ssize_t>(out.size())}),
                                ops.adds, ops.muls);
        },
        py::arg("diag"), py::arg("f"), "Returns (M f, adds, muls).");
  m.def("reconstruct_dense",
        [](const Array& diag) {
          const auto m = ts::reconstruct_dense(to_vector(diag));
          const auto n = static_cast<py::ssize_t>(m.n);
          return from_vector(m.a, {n, n});
        },
        py::arg("diag"));

  m.def("diagonal",
        [](int k, int slot, const std::string& functional) {
          const ts::DiagonalCache cache = ts::compute_ms(k, parse_functional(functional));
          if (slot < 0 || slot >= cache.slots(k)) throw ts::ValidationError("slot out of range");
          const auto v = cache.vector(k, slot);
          return from_vector({v.begin(), v.end()}, {static_cast<py::ssize_t>(v.size())});
        },
        py::arg("k"), py::arg("slot"), py::arg("functional") = "shapley",
        "Secondary diagonal of M for k path features. A slot is a position, or a pair index\n"
        "for interactions.");

  m.def("cube_value",
        [](std::uint32_t positive, std::uint32_t negative, double weight,
           const std::string& functional, int position, int second) {
          const ts::Cube cube{positive, negative, weight};
          return ts::functional_of_cube(parse_functional(functional), cube, position, second);
        },
        py::arg("positive"), py::arg("negative"), py::arg("weight") = 1.0,
        py::arg("functional") = "shapley", py::arg("position") = 0, py::arg("second") = -1,
        "Functional of a single cube; bit j of positive/negative is position j.");

  m.def("bench",
        [](const std::vector<int>& depths, const std::string& method, std::size_t leaves,
           int trials, std::uint64_t seed) {
          ts::BenchConfig config;
          config.depths = depths;
          if (method == "hd") {
            config.methods = {ts::BenchMethod::kHd};
          } else if (method == "dense") {
            config.methods = {ts::BenchMethod::kDense};
          } else if (method == "both") {
            config.methods = {ts::BenchMethod::kHd, ts::BenchMethod::kDense};
          } else {
            throw ts::ValidationError("unknown method '" + method + "'");
          }
          config.leaves = leaves;
          config.trials = trials;
          config.seed = seed;
          py::gil_scoped_release release;
          return ts::run_bench(config).to_json();
        },
        py::arg("depths"), py::arg("method") = "hd", py::arg("leaves") = 4,
        py::arg("trials") = 15, py::arg("seed") = 1, "Runs the benchmark; returns JSON text.");
}
