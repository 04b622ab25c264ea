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

#ifndef TREESHAP_HD_BENCH_HPP_
#define TREESHAP_HD_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "treeshap_hd/cube.hpp"
#include "treeshap_hd/engine.hpp"

namespace treeshap_hd {

enum class BenchMethod : std::uint8_t { kHd, kDense };

const char* method_name(BenchMethod method);

struct BenchConfig {
  std::vector<int> depths;
  std::vector<BenchMethod> methods{BenchMethod::kHd};
  ExplainMode mode = ExplainMode::kBackground;
  Functional functional = Functional::kShapley;
  std::uint64_t seed = 1;
  std::size_t consumer_rows = 16;
  std::size_t background_rows = 16;
  // Leaves of the synthetic complete tree pushed through the per-leaf
  // pipeline; the first ones in generator order.
  std::size_t leaves = 4;
  // Timing runs in `trials` rounds that cycle over every configuration. In
  // each round a leaf gets one warm-up run and is then repeated until
  // min_seconds_per_leaf has elapsed (once when zero). The reported time is
  // the lower quartile of the per-round means. Repeats let small leaves
  // reuse cached diagonals that large ones cannot, so zero keeps depths
  // comparable.
  double min_seconds_per_leaf = 0.0;
  int trials = 15;
  std::size_t memory_budget_bytes = std::numeric_limits<std::size_t>::max();
  int depth_cap = kDefaultDepthCap;
};

struct BenchRecord {
  int depth = 0;
  BenchMethod method = BenchMethod::kHd;
  ExplainMode mode = ExplainMode::kBackground;
  Functional functional = Functional::kShapley;
  bool skipped = false;
  std::string reason;
  std::size_t leaves_timed = 0;
  double wall_time_seconds = 0.0;  // per-leaf time x leaves_timed
  double seconds_per_leaf = 0.0;
  double setup_seconds = 0.0;      // cache construction (hd only)
  std::size_t peak_bytes = 0;      // cache + workspace + pattern vectors
  std::uint64_t adds = 0;          // over one pass of the timed leaves
  std::uint64_t muls = 0;
};

struct BenchReport {
  std::vector<BenchRecord> records;

  std::string to_json() const;
  std::string summary_table() const;
};

BenchReport run_bench(const BenchConfig& config);

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_BENCH_HPP_
