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

#include "treeshap_hd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"
#include "treeshap_hd/errors.hpp"
#include "treeshap_hd/synth.hpp"

namespace treeshap_hd {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CapturedLeaf {
  double weight;
  std::vector<int> features;
  std::vector<Pattern> consumer_patterns;
  std::vector<double> f;
  std::size_t pattern_bytes;
};

std::vector<CapturedLeaf> capture_leaves(const DecisionTree& tree, const Dataset& consumers,
                                         const Dataset& background, ExplainMode mode,
                                         const BenchConfig& config) {
  UfdpGenerator cgen(tree, consumers, config.depth_cap);
  UfdpGenerator bgen(tree, background, config.depth_cap);
  RootToLeafPaths paths(tree);
  LeafPath path;
  std::vector<CapturedLeaf> out;
  while (out.size() < config.leaves) {
    auto c = cgen.next();
    if (!c) break;
    CapturedLeaf leaf;
    leaf.weight = tree.node(c->leaf).weight;
    leaf.features.assign(c->features.begin(), c->features.end());
    leaf.consumer_patterns.assign(c->patterns.begin(), c->patterns.end());
    if (mode == ExplainMode::kBackground) {
      auto b = bgen.next();
      leaf.f = background_f(b->patterns, b->k()).values;
    } else {
      paths.next(path);
      leaf.f = path_dependent_f(tree, path).values;
    }
    leaf.pattern_bytes = cgen.peak_bytes() + bgen.peak_bytes();
    out.push_back(std::move(leaf));
  }
  return out;
}

// One (depth, method) configuration with everything needed to rerun its
// leaves. Timing rounds cycle over all jobs so slow phases of the host are
// spread across depths instead of landing on one of them.
struct Job {
  std::size_t record = 0;
  std::vector<CapturedLeaf> leaves;
  std::unique_ptr<CacheSet> caches;
  std::unique_ptr<LeafAccumulator> hd;
  std::unique_ptr<DenseLeafAccumulator> dense;
  std::vector<double> values;
  std::vector<double> rounds;  // mean seconds per leaf, one entry per round

  void run(const CapturedLeaf& leaf, OpCounts* counts) {
    const LeafInput input{leaf.weight, leaf.features, leaf.consumer_patterns, leaf.f};
    if (hd) {
      hd->accumulate(input, values, counts);
    } else {
      dense->accumulate(input, values, counts);
    }
  }

  std::size_t workspace_bytes() const {
    return hd ? hd->peak_workspace_bytes() : dense->peak_workspace_bytes();
  }
};

double time_once(Job& job, const CapturedLeaf& leaf, double min_seconds) {
  job.run(leaf, nullptr);  // warm the caches after the previous job
  std::size_t reps = 0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do {
    job.run(leaf, nullptr);
    ++reps;
    elapsed = seconds_since(start);
  } while (elapsed < min_seconds);
  return elapsed / static_cast<double>(reps);
}

}  // namespace

const char* method_name(BenchMethod method) {
  return method == BenchMethod::kHd ? "hd" : "dense_baseline";
}

BenchReport run_bench(const BenchConfig& config) {
  BenchReport report;
  std::vector<Job> jobs;
  std::vector<int> depths = config.depths;
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  for (int depth : depths) {
    std::mt19937_64 rng(config.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(depth)));
    const EnsembleModel model = complete_tree_model(depth, config.seed + static_cast<std::uint64_t>(depth));
    const auto n_features = static_cast<std::size_t>(model.n_features());
    const Dataset consumers = random_dataset(rng, config.consumer_rows, n_features);
    const Dataset background = random_dataset(rng, config.background_rows, n_features);
    const bool interaction = config.functional == Functional::kShapleyInteraction;
    const std::size_t stride = interaction ? n_features * n_features : n_features;

    for (BenchMethod method : config.methods) {
      BenchRecord record;
      record.depth = depth;
      record.method = method;
      record.mode = config.mode;
      record.functional = config.functional;
      const std::size_t len = std::size_t{1} << std::min(depth, 62);
      if (method == BenchMethod::kDense) {
        std::size_t entries = 1;
        for (int i = 0; i < depth && entries < (std::size_t{1} << 60); ++i) entries *= 3;
        const std::size_t projected = entries * sizeof(CubeEntry) + 2 * len * sizeof(double);
        if (depth > kMaxDenseK || projected > config.memory_budget_bytes) {
          record.skipped = true;
          record.reason = "budget";
          report.records.push_back(record);
          continue;
        }
      } else {
        const Functional main = interaction ? Functional::kShapley : config.functional;
        std::size_t projected = depth > kMaxDiagonalK
                                    ? std::numeric_limits<std::size_t>::max()
                                    : DiagonalCache::entries_for(main, depth) * sizeof(double);
        if (interaction && depth <= kMaxDiagonalK) {
          projected += DiagonalCache::entries_for(Functional::kShapleyInteraction, depth) * sizeof(double);
        }
        if (depth > config.depth_cap || projected > config.memory_budget_bytes) {
          record.skipped = true;
          record.reason = "budget";
          report.records.push_back(record);
          continue;
        }
      }

      Job job;
      job.leaves =
          capture_leaves(model.trees().front(), consumers, background, config.mode, config);
      job.values.assign(config.consumer_rows * stride, 0.0);
      if (method == BenchMethod::kHd) {
        const auto start = Clock::now();
        job.caches = std::make_unique<CacheSet>(build_caches(depth, config.functional));
        record.setup_seconds = seconds_since(start);
        record.peak_bytes = job.caches->main.bytes() + job.caches->pairs.bytes();
        job.hd = std::make_unique<LeafAccumulator>(*job.caches, config.functional, n_features);
      } else {
        job.dense = std::make_unique<DenseLeafAccumulator>(config.functional, n_features);
      }
      // One counted pass doubles as warm-up.
      OpCounts ops;
      std::size_t pattern_bytes = 0;
      for (const auto& leaf : job.leaves) {
        job.run(leaf, &ops);
        pattern_bytes = std::max(pattern_bytes, leaf.pattern_bytes);
      }
      record.leaves_timed = job.leaves.size();
      record.adds = ops.adds;
      record.muls = ops.muls;
      const std::size_t f_bytes =
          job.leaves.empty() ? 0 : job.leaves.front().f.size() * sizeof(double);
      record.peak_bytes += job.workspace_bytes() + pattern_bytes + f_bytes +
                           job.values.size() * sizeof(double);
      job.record = report.records.size();
      report.records.push_back(record);
      jobs.push_back(std::move(job));
    }
  }

  for (int round = 0; round < std::max(config.trials, 1); ++round) {
    for (auto& job : jobs) {
      double sum = 0.0;
      for (const auto& leaf : job.leaves) sum += time_once(job, leaf, config.min_seconds_per_leaf);
      job.rounds.push_back(job.leaves.empty() ? 0.0 : sum / static_cast<double>(job.leaves.size()));
    }
  }
  for (auto& job : jobs) {
    BenchRecord& record = report.records[job.record];
    // Lower quartile over rounds: the host drifts between slow and fast
    // phases, and a single lucky round should not set the figure either.
    auto q = job.rounds.begin() + static_cast<std::ptrdiff_t>(job.rounds.size() / 4);
    std::nth_element(job.rounds.begin(), q, job.rounds.end());
    record.seconds_per_leaf = *q;
    record.wall_time_seconds = record.seconds_per_leaf * static_cast<double>(job.leaves.size());
  }
  return report;
}

std::string BenchReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["depth"] = r.depth;
    j["method"] = method_name(r.method);
    j["mode"] = mode_name(r.mode);
    j["functional"] = functional_name(r.functional);
    j["status"] = r.skipped ? "skipped" : "ok";
    if (r.skipped) j["reason"] = r.reason;
    j["leaves_timed"] = r.leaves_timed;
    j["wall_time_seconds"] = r.wall_time_seconds;
    j["seconds_per_leaf"] = r.seconds_per_leaf;
    j["setup_seconds"] = r.setup_seconds;
    j["peak_bytes"] = r.peak_bytes;
    j["adds"] = r.adds;
    j["muls"] = r.muls;
    out.push_back(std::move(j));
  }
  return nlohmann::json{{"records", std::move(out)}}.dump(2);
}

std::string BenchReport::summary_table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%5s  %-14s  %-8s  %14s  %12s  %14s  %14s  %14s\n", "depth",
                "method", "status", "s/leaf", "setup s", "peak bytes", "adds", "muls");
  out << line;
  for (const auto& r : records) {
    std::snprintf(line, sizeof(line), "%5d  %-14s  %-8s  %14.6e  %12.4f  %14zu  %14llu  %14llu\n",
                  r.depth, method_name(r.method), r.skipped ? "skipped" : "ok", r.seconds_per_leaf,
                  r.setup_seconds, r.peak_bytes, static_cast<unsigned long long>(r.adds),
                  static_cast<unsigned long long>(r.muls));
    out << line;
  }
  return out.str();
}

}  // namespace treeshap_hd
