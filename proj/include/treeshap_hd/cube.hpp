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

#ifndef TREESHAP_HD_CUBE_HPP_
#define TREESHAP_HD_CUBE_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "treeshap_hd/fast_mult.hpp"

namespace treeshap_hd {

using PositionSet = std::uint32_t;  // bit j <-> feature position j

// Weighted conjunction of literals over feature positions. The game it
// induces is C(S) = weight iff positive is a subset of S and S is disjoint
// from negative.
struct Cube {
  PositionSet positive = 0;
  PositionSet negative = 0;
  double weight = 1.0;

  int positive_count() const;
  int negative_count() const;
  bool has(int position) const { return ((positive | negative) >> position) & 1U; }
  bool empty() const { return (positive | negative) == 0; }
  // Game value at coalition S (bit j <-> position j).
  double evaluate(PositionSet coalition) const;
  std::string to_string() const;
};

enum class Functional : std::uint8_t { kShapley = 0, kBanzhaf = 1, kShapleyInteraction = 2 };

const char* functional_name(Functional f);

// With p = |positive|, q = |negative|:
//   position in positive:  weight * (p-1)! q! / (p+q)!
//   position in negative: -weight * p! (q-1)! / (p+q)!
double shapley_of_cube(const Cube& cube, int position);

// +-weight * 2^(1-p-q) for members, 0 for non-members.
double banzhaf_of_cube(const Cube& cube, int position);

// Shapley interaction index of the cube game for an unordered pair:
//   both positive:  weight * (p-2)! q! / (p+q-1)!
//   mixed signs:   -weight * (p-1)! (q-1)! / (p+q-1)!
//   both negative:  weight * p! (q-2)! / (p+q-1)!
// Zero when either position is outside the cube. Throws InvalidPairError
// when i == j.
double shapley_interaction_of_cube(const Cube& cube, int i, int j);

// Dispatches on the functional; `second` is only read for interactions.
double functional_of_cube(Functional functional, const Cube& cube, int position, int second = -1);

// 1 / C(n, r) computed from an exact integer binomial (n <= 60).
double inverse_binomial(int n, int r);

struct CubeEntry {
  std::uint32_t row = 0;  // consumer pattern
  std::uint32_t col = 0;  // background pattern
  Cube cube;
};

// Sparse consumer-pattern x background-pattern map to cubes, 3^k entries.
class MCubesMatrix {
 public:
  MCubesMatrix(int k, std::vector<CubeEntry> entries);

  int k() const { return k_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<CubeEntry>& entries() const { return entries_; }
  // nullptr when no cube is stored at (row, col).
  const Cube* find(std::uint32_t row, std::uint32_t col) const;

  // Applies a per-position functional to every cube. For the interaction
  // functional pass both positions; otherwise `second` is ignored.
  DenseMatrix densify(Functional functional, int position, int second = -1) const;

 private:
  int k_;
  std::vector<CubeEntry> entries_;  // sorted by (row, col)
};

// Bit convention: consumer 1 / background 0 adds a positive literal,
// 0 / 1 a negative literal, 1 / 1 none, 0 / 0 stores nothing. Position i
// is the i-th expansion and maps to bit k-1-i of both indices.
MCubesMatrix map_patterns_to_cube(int k);

// Secondary-diagonal cubes only: element a is the cube at (a, 2^k-1-a).
std::vector<Cube> cubes_in_diagonal(int k);

// Cap used by the cube constructors (3^k entries for the full matrix).
inline constexpr int kMaxCubeMatrixK = 14;
inline constexpr int kMaxDiagonalK = 30;

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_CUBE_HPP_
