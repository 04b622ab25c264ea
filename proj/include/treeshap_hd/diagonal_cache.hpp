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

#ifndef TREESHAP_HD_DIAGONAL_CACHE_HPP_
#define TREESHAP_HD_DIAGONAL_CACHE_HPP_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "treeshap_hd/cube.hpp"

namespace treeshap_hd {

// Secondary diagonals of the M matrices for every unique-feature count
// k = 1..max_k. A slot is a feature position (Shapley, Banzhaf) or an
// unordered position pair (interaction). The cache does not depend on which
// features sit on a path, so one cache serves every leaf.
class DiagonalCache {
 public:
  DiagonalCache() = default;
  DiagonalCache(int max_k, Functional functional);

  int max_k() const { return max_k_; }
  Functional functional() const { return functional_; }

  int slots(int k) const { return slots_for(functional_, k); }
  std::span<const double> vector(int k, int slot) const;
  std::span<double> vector(int k, int slot);

  std::size_t entries() const { return data_.size(); }
  std::size_t bytes() const { return data_.size() * sizeof(double); }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }

  static int slots_for(Functional functional, int k);
  static std::size_t entries_for(Functional functional, int max_k);
  // Index of the unordered pair (i, j), i < j, among the C(k, 2) pairs in
  // lexicographic order.
  static int pair_slot(int k, int i, int j);

  // Flat little-endian file: "TSHDDIAG", u32 version, u32 max_k,
  // u32 functional, then every vector in (k, slot) order as f64.
  void save(const std::string& path) const;
  static DiagonalCache load(const std::string& path);

 private:
  std::size_t offset(int k, int slot) const;

  int max_k_ = 0;
  Functional functional_ = Functional::kShapley;
  std::vector<std::size_t> block_offsets_;  // indexed by k
  std::vector<double> data_;
};

// Builds the cache by evaluating the functional on cubes_in_diagonal(k) for
// every k <= max_k. Throws DepthCapError past kMaxDiagonalK and
// OutOfMemoryBudget when the cache would exceed byte_budget.
DiagonalCache compute_ms(int max_k, Functional functional,
                         std::size_t byte_budget = std::numeric_limits<std::size_t>::max());

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_DIAGONAL_CACHE_HPP_
