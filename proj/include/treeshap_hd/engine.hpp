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

#ifndef TREESHAP_HD_ENGINE_HPP_
#define TREESHAP_HD_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "treeshap_hd/cube.hpp"
#include "treeshap_hd/dataset.hpp"
#include "treeshap_hd/diagonal_cache.hpp"
#include "treeshap_hd/fast_mult.hpp"
#include "treeshap_hd/patterns.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace treeshap_hd {

enum class ExplainMode : std::uint8_t { kBackground, kPathDependent };

const char* mode_name(ExplainMode mode);

struct EngineOptions {
  int threads = 1;
  std::size_t memory_budget_bytes = std::numeric_limits<std::size_t>::max();
  int depth_cap = kDefaultDepthCap;
  std::size_t chunk_rows = kDefaultChunkRows;
};

struct ExplainRequest {
  const EnsembleModel& model;
  const Dataset& consumers;
  // Required in background mode, ignored in path-dependent mode.
  const Dataset* background = nullptr;
  ExplainMode mode = ExplainMode::kBackground;
  Functional functional = Functional::kShapley;
};

struct ExplainStats {
  std::size_t leaves = 0;
  OpCounts ops;
  std::size_t cache_bytes = 0;
  // Largest workspace held by one worker: f, scratch and s vectors plus the
  // live pattern vectors of both generators.
  std::size_t peak_workspace_bytes = 0;
  std::size_t peak_pattern_vectors = 0;
  // Dense baseline only: cubes stored per leaf, summed over leaves.
  std::size_t cube_entries = 0;
};

// Per-consumer attributions. Shapley and Banzhaf give rows x features;
// interaction gives rows x features x features with diagonal
// phi_i - sum_{j != i} phi_ij so each row sums to phi_i.
struct AttributionResult {
  std::size_t rows = 0;
  std::size_t features = 0;
  Functional functional = Functional::kShapley;
  double base_value = 0.0;
  std::vector<double> values;
  ExplainStats stats;

  bool interaction() const { return functional == Functional::kShapleyInteraction; }
  std::size_t row_stride() const { return interaction() ? features * features : features; }
  double at(std::size_t r, std::size_t i) const { return values[r * row_stride() + i]; }
  double at(std::size_t r, std::size_t i, std::size_t j) const {
    return values[r * row_stride() + i * features + j];
  }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * row_stride(), row_stride()};
  }
};

// Caches used by explain(). Interaction runs need the Shapley cache for the
// main effects plus the pair cache.
struct CacheSet {
  DiagonalCache main;
  DiagonalCache pairs;
};

CacheSet build_caches(int max_k, Functional functional,
                      std::size_t byte_budget = std::numeric_limits<std::size_t>::max());

// Everything the per-leaf pipeline needs.
struct LeafInput {
  double weight = 0.0;
  std::span<const int> features;  // unique path features, first-appearance order
  std::span<const Pattern> consumer_patterns;
  std::span<const double> f;
};

// Adds one leaf's contribution into a row-major attribution block: for
// every path position j, s = weight * M_j f and values[c][feature_j] +=
// s[pattern_c]. For interactions the main effects land on the diagonal and
// need finalize_interaction_diagonal() once all leaves are in.
class LeafAccumulator {
 public:
  LeafAccumulator(const CacheSet& caches, Functional functional, std::size_t n_features);

  void accumulate(const LeafInput& leaf, std::span<double> values, OpCounts* counts = nullptr);
  std::size_t peak_workspace_bytes() const { return peak_bytes_; }

 private:
  const CacheSet* caches_;
  Functional functional_;
  std::size_t n_features_;
  SharedDownwardPass pass_;
  std::vector<double> s_;
  std::size_t peak_bytes_ = 0;
};

// Reference accumulator: builds the full cube matrix for the leaf and
// multiplies sparsely, O(3^k) per position.
class DenseLeafAccumulator {
 public:
  DenseLeafAccumulator(Functional functional, std::size_t n_features);

  void accumulate(const LeafInput& leaf, std::span<double> values, OpCounts* counts = nullptr);
  std::size_t peak_workspace_bytes() const { return peak_bytes_; }
  std::size_t last_entries() const { return last_entries_; }
  std::size_t total_entries() const { return total_entries_; }

 private:
  Functional functional_;
  std::size_t n_features_;
  std::vector<double> s_;
  std::size_t peak_bytes_ = 0;
  std::size_t last_entries_ = 0;
  std::size_t total_entries_ = 0;
};

void finalize_interaction_diagonal(std::span<double> values, std::size_t rows,
                                   std::size_t n_features);

// Exact attributions for every consumer row, leaf by leaf.
// `caches_override` replaces the internally built caches (used to inject
// faults in validation tests).
AttributionResult explain(const ExplainRequest& request, const EngineOptions& options = {},
                          const CacheSet* caches_override = nullptr);

// Same contract as explain() through map_patterns_to_cube and sparse
// products. Paths are limited to kMaxDenseK unique features.
AttributionResult explain_dense_baseline(const ExplainRequest& request,
                                         const EngineOptions& options = {});

// Bytes explain() expects to hold at peak; compared with the budget.
std::size_t projected_peak_bytes(const ExplainRequest& request, const EngineOptions& options);

// ---------------------------------------------------------------------------
// Definition-level oracles. Both enumerate every subset of the model's
// active features, so they are limited to kMaxOracleFeatures of them.

inline constexpr int kMaxOracleFeatures = 14;

struct OracleResult {
  std::vector<double> values;  // features, or features x features
  double base_value = 0.0;     // v(empty set)
};

// v(S) = mean over background rows b of predict(x on S, b elsewhere).
OracleResult background_shap_bruteforce(const EnsembleModel& model, std::span<const double> x,
                                        const Dataset& background, Functional functional);

// v(S) by traversal: follow x at nodes splitting on a feature in S, else
// average both children by cover.
OracleResult path_dependent_bruteforce(const EnsembleModel& model, std::span<const double> x,
                                       Functional functional);

// Game-table helpers shared by the oracles; `table[mask]` is v on the subset
// of `players` selected by mask.
std::vector<double> shapley_from_table(std::span<const double> table, int players);
std::vector<double> banzhaf_from_table(std::span<const double> table, int players);
// Unordered pairs as a players x players matrix with zero diagonal.
std::vector<double> interaction_from_table(std::span<const double> table, int players);

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_ENGINE_HPP_
