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

#include "treeshap_hd/engine.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {

const char* mode_name(ExplainMode mode) {
  return mode == ExplainMode::kBackground ? "background" : "path-dependent";
}

CacheSet build_caches(int max_k, Functional functional, std::size_t byte_budget) {
  CacheSet caches;
  if (functional == Functional::kShapleyInteraction) {
    const std::size_t pair_bytes =
        DiagonalCache::entries_for(Functional::kShapleyInteraction, max_k) * sizeof(double);
    if (pair_bytes > byte_budget) {
      throw OutOfMemoryBudget("interaction cache for depth " + std::to_string(max_k) +
                              " needs " + std::to_string(pair_bytes) + " bytes");
    }
    caches.main = compute_ms(max_k, Functional::kShapley, byte_budget - pair_bytes);
    caches.pairs = compute_ms(max_k, Functional::kShapleyInteraction, byte_budget);
  } else {
    caches.main = compute_ms(max_k, functional, byte_budget);
  }
  return caches;
}

// ---------------------------------------------------------------------------

LeafAccumulator::LeafAccumulator(const CacheSet& caches, Functional functional,
                                 std::size_t n_features)
    : caches_(&caches), functional_(functional), n_features_(n_features) {}

void LeafAccumulator::accumulate(const LeafInput& leaf, std::span<double> values,
                                 OpCounts* counts) {
  const int k = static_cast<int>(leaf.features.size());
  if (k == 0) return;
  if (k > caches_->main.max_k()) {
    throw LengthError("diagonal cache covers k <= " + std::to_string(caches_->main.max_k()) +
                      ", leaf needs " + std::to_string(k));
  }
  const std::size_t len = std::size_t{1} << k;
  pass_.reset(leaf.f, counts);
  s_.resize(len);
  peak_bytes_ = std::max(peak_bytes_, 3 * len * sizeof(double));

  const auto patterns = leaf.consumer_patterns;
  const double w = leaf.weight;
  const std::size_t f_count = n_features_;

  if (functional_ != Functional::kShapleyInteraction) {
    for (int j = 0; j < k; ++j) {
      pass_.multiply(caches_->main.vector(k, j), s_, counts);
      const auto feature = static_cast<std::size_t>(leaf.features[static_cast<std::size_t>(j)]);
      for (std::size_t c = 0; c < patterns.size(); ++c) {
        values[c * f_count + feature] += w * s_[patterns[c]];
      }
    }
    return;
  }

  const std::size_t stride = f_count * f_count;
  for (int j = 0; j < k; ++j) {
    pass_.multiply(caches_->main.vector(k, j), s_, counts);
    const auto feature = static_cast<std::size_t>(leaf.features[static_cast<std::size_t>(j)]);
    for (std::size_t c = 0; c < patterns.size(); ++c) {
      values[c * stride + feature * f_count + feature] += w * s_[patterns[c]];
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      pass_.multiply(caches_->pairs.vector(k, DiagonalCache::pair_slot(k, i, j)), s_, counts);
      const auto fi = static_cast<std::size_t>(leaf.features[static_cast<std::size_t>(i)]);
      const auto fj = static_cast<std::size_t>(leaf.features[static_cast<std::size_t>(j)]);
      for (std::size_t c = 0; c < patterns.size(); ++c) {
        const double v = w * s_[patterns[c]];
        values[c * stride + fi * f_count + fj] += v;
        values[c * stride + fj * f_count + fi] += v;
      }
    }
  }
}

DenseLeafAccumulator::DenseLeafAccumulator(Functional functional, std::size_t n_features)
    : functional_(functional), n_features_(n_features) {}

void DenseLeafAccumulator::accumulate(const LeafInput& leaf, std::span<double> values,
                                      OpCounts* counts) {
  const int k = static_cast<int>(leaf.features.size());
  if (k == 0) return;
  if (k > kMaxDenseK) {
    throw DepthCapError("dense baseline supports at most " + std::to_string(kMaxDenseK) +
                        " unique features per path, leaf has " + std::to_string(k));
  }
  const MCubesMatrix cubes = map_patterns_to_cube(k);
  const std::size_t len = std::size_t{1} << k;
  last_entries_ = cubes.size();
  total_entries_ += cubes.size();
  s_.resize(len);
  peak_bytes_ = std::max(peak_bytes_, cubes.size() * sizeof(CubeEntry) + 2 * len * sizeof(double));

  const auto patterns = leaf.consumer_patterns;
  const double w = leaf.weight;
  const std::size_t f_count = n_features_;
  const bool interaction = functional_ == Functional::kShapleyInteraction;
  const std::size_t stride = interaction ? f_count * f_count : f_count;
  const Functional main = interaction ? Functional::kShapley : functional_;

  auto sparse_product = [&](Functional fn, int i, int j) {
    std::fill(s_.begin(), s_.end(), 0.0);
    for (const auto& e : cubes.entries()) {
      const double m = functional_of_cube(fn, e.cube, i, j);
      s_[e.row] += m * leaf.f[e.col];
    }
    if (counts) {
      counts->adds += cubes.size();
      counts->muls += cubes.size();
    }
  };

  for (int j = 0; j < k; ++j) {
    sparse_product(main, j, -1);
    const auto feature = static_cast<std::size_t>(leaf.features[static_cast<std::size_t>(j)]);
    const std::size_t offset = interaction ? feature * f_count + feature : feature;
    for (std::size_t c = 0; c < patterns.size(); ++c) {
      values[c * stride + offset] += w * s_[patterns[c]];
    }
  }
  if (!interaction) return;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      sparse_product(Functional::kShapleyInteraction, i, j);
      const auto fi = static_cast<std::size_t>(leaf.features[static_cast<std::size_t>(i)]);
      const auto fj = static_cast<std::size_t>(leaf.features[static_cast<std::size_t>(j)]);
      for (std::size_t c = 0; c < patterns.size(); ++c) {
        const double v = w * s_[patterns[c]];
        values[c * stride + fi * f_count + fj] += v;
        values[c * stride + fj * f_count + fi] += v;
      }
    }
  }
}

void finalize_interaction_diagonal(std::span<double> values, std::size_t rows,
                                   std::size_t n_features) {
  const std::size_t stride = n_features * n_features;
  for (std::size_t r = 0; r < rows; ++r) {
    double* block = values.data() + r * stride;
    for (std::size_t i = 0; i < n_features; ++i) {
      double off = 0.0;
      for (std::size_t j = 0; j < n_features; ++j) {
        if (j != i) off += block[i * n_features + j];
      }
      block[i * n_features + i] -= off;
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

void validate_request(const ExplainRequest& request) {
  const auto n_features = static_cast<std::size_t>(request.model.n_features());
  if (request.consumers.cols() != n_features) {
    throw ValidationError("consumer data has " + std::to_string(request.consumers.cols()) +
                          " columns, model expects " + std::to_string(n_features));
  }
  request.consumers.require_finite();
  if (request.mode == ExplainMode::kBackground) {
    if (request.background == nullptr || request.background->rows() == 0) {
      throw EmptyBackgroundError("background mode needs at least one background row");
    }
    if (request.background->cols() != n_features) {
      throw ValidationError("background data has " + std::to_string(request.background->cols()) +
                            " columns, model expects " + std::to_string(n_features));
    }
    request.background->require_finite();
  } else {
    for (std::size_t t = 0; t < request.model.trees().size(); ++t) {
      if (!request.model.trees()[t].has_covers()) {
        throw MissingCoverError("path-dependent mode needs covers; tree " + std::to_string(t) +
                                " has nodes without cover");
      }
    }
  }
}

struct WorkerState {
  std::vector<double> values;
  double base = 0.0;
  ExplainStats stats;
  std::exception_ptr error;
};

template <typename Accumulator>
void process_tree(const DecisionTree& tree, const ExplainRequest& request,
                  const EngineOptions& options, Accumulator& acc, WorkerState& state) {
  UfdpGenerator consumers(tree, request.consumers, options.depth_cap, options.chunk_rows);
  const bool background_mode = request.mode == ExplainMode::kBackground;
  static const Dataset kNoRows;
  UfdpGenerator background(tree, background_mode ? *request.background : kNoRows,
                           options.depth_cap, options.chunk_rows);
  RootToLeafPaths paths(tree);
  LeafPath path;

  while (auto leaf = consumers.next()) {
    FVector f;
    if (background_mode) {
      auto b = background.next();
      if (!b || b->leaf != leaf->leaf) throw Error("background pattern stream out of step");
      f = background_f(b->patterns, b->k());
    } else {
      if (!paths.next(path) || path.leaf != leaf->leaf) {
        throw Error("root-to-leaf path stream out of step");
      }
      f = path_dependent_f(tree, path);
    }
    const double weight = tree.node(leaf->leaf).weight;
    state.base += weight * f.values.back();
    ++state.stats.leaves;
    acc.accumulate(LeafInput{weight, leaf->features, leaf->patterns, f.values}, state.values,
                   &state.stats.ops);
  }
  if constexpr (requires { acc.total_entries(); }) state.stats.cube_entries = acc.total_entries();
  const std::size_t pattern_vectors = consumers.peak_live_vectors() + background.peak_live_vectors();
  state.stats.peak_pattern_vectors = std::max(state.stats.peak_pattern_vectors, pattern_vectors);
  const std::size_t pattern_bytes = consumers.peak_bytes() + background.peak_bytes();
  state.stats.peak_workspace_bytes =
      std::max(state.stats.peak_workspace_bytes, acc.peak_workspace_bytes() + pattern_bytes);
}

template <typename MakeAccumulator>
AttributionResult run(const ExplainRequest& request, const EngineOptions& options,
                      MakeAccumulator make_accumulator) {
  const auto& trees = request.model.trees();
  const std::size_t n_features = static_cast<std::size_t>(request.model.n_features());
  AttributionResult result;
  result.rows = request.consumers.rows();
  result.features = n_features;
  result.functional = request.functional;
  const std::size_t block = result.rows * result.row_stride();

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)),
                                                     trees.size()));
  std::vector<WorkerState> states(workers);
  auto work = [&](std::size_t w) {
    WorkerState& state = states[w];
    try {
      state.values.assign(block, 0.0);
      auto acc = make_accumulator();
      const std::size_t begin = w * trees.size() / workers;
      const std::size_t end = (w + 1) * trees.size() / workers;
      for (std::size_t t = begin; t < end; ++t) {
        process_tree(trees[t], request, options, acc, state);
      }
    } catch (...) {
      state.error = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& state : states) {
    if (state.error) std::rethrow_exception(state.error);
  }

  // Fixed worker order keeps the reduction deterministic.
  result.values = std::move(states[0].values);
  double base = states[0].base;
  result.stats = states[0].stats;
  for (std::size_t w = 1; w < workers; ++w) {
    for (std::size_t i = 0; i < block; ++i) result.values[i] += states[w].values[i];
    base += states[w].base;
    result.stats.leaves += states[w].stats.leaves;
    result.stats.ops += states[w].stats.ops;
    result.stats.cube_entries += states[w].stats.cube_entries;
    result.stats.peak_workspace_bytes =
        std::max(result.stats.peak_workspace_bytes, states[w].stats.peak_workspace_bytes);
    result.stats.peak_pattern_vectors =
        std::max(result.stats.peak_pattern_vectors, states[w].stats.peak_pattern_vectors);
  }
  result.base_value = request.model.base_score() + base;
  if (result.interaction()) finalize_interaction_diagonal(result.values, result.rows, n_features);
  return result;
}

}  // namespace

std::size_t projected_peak_bytes(const ExplainRequest& request, const EngineOptions& options) {
  const int k = request.model.max_unique_features();
  std::size_t cache = DiagonalCache::entries_for(request.functional == Functional::kShapleyInteraction
                                                     ? Functional::kShapley
                                                     : request.functional,
                                                 k);
  if (request.functional == Functional::kShapleyInteraction) {
    cache += DiagonalCache::entries_for(Functional::kShapleyInteraction, k);
  }
  const std::size_t n = request.consumers.rows();
  const std::size_t m =
      request.mode == ExplainMode::kBackground && request.background ? request.background->rows() : 0;
  const std::size_t f = static_cast<std::size_t>(request.model.n_features());
  const std::size_t stride = request.functional == Functional::kShapleyInteraction ? f * f : f;
  const std::size_t depth = static_cast<std::size_t>(request.model.max_path_depth());
  const std::size_t per_worker = 3 * (std::size_t{1} << k) * sizeof(double) +
                                 2 * (depth + 1) * (n + m) * sizeof(Pattern) +
                                 n * stride * sizeof(double);
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)),
                               request.model.trees().size()));
  return cache * sizeof(double) + workers * per_worker;
}

AttributionResult explain(const ExplainRequest& request, const EngineOptions& options,
                          const CacheSet* caches_override) {
  validate_request(request);
  const int max_k = request.model.max_unique_features();
  if (max_k > std::min(options.depth_cap, kMaxDepthCap)) {
    throw DepthCapError("model has a path with " + std::to_string(max_k) +
                        " unique features, cap is " + std::to_string(options.depth_cap));
  }
  const std::size_t projected = projected_peak_bytes(request, options);
  if (projected > options.memory_budget_bytes) {
    throw BudgetExceededError("projected peak memory " + std::to_string(projected) +
                              " bytes exceeds budget " +
                              std::to_string(options.memory_budget_bytes));
  }
  CacheSet owned;
  const CacheSet* caches = caches_override;
  if (caches == nullptr) {
    owned = build_caches(max_k, request.functional, options.memory_budget_bytes);
    caches = &owned;
  }
  const auto n_features = static_cast<std::size_t>(request.model.n_features());
  AttributionResult result = run(request, options, [&] {
    return LeafAccumulator(*caches, request.functional, n_features);
  });
  result.stats.cache_bytes = caches->main.bytes() + caches->pairs.bytes();
  return result;
}

AttributionResult explain_dense_baseline(const ExplainRequest& request,
                                         const EngineOptions& options) {
  validate_request(request);
  const int max_k = request.model.max_unique_features();
  if (max_k > kMaxDenseK) {
    throw DepthCapError("dense baseline supports at most " + std::to_string(kMaxDenseK) +
                        " unique features per path, model has " + std::to_string(max_k));
  }
  const auto n_features = static_cast<std::size_t>(request.model.n_features());
  return run(request, options, [&] {
    return DenseLeafAccumulator(request.functional, n_features);
  });
}

}  // namespace treeshap_hd
