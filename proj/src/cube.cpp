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

#include "treeshap_hd/cube.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {
namespace {

constexpr int kBinomialRows = 62;

using BinomialTable = std::array<std::array<std::uint64_t, kBinomialRows + 1>, kBinomialRows + 1>;

BinomialTable make_binomials() {
  BinomialTable t{};
  for (int n = 0; n <= kBinomialRows; ++n) {
    t[n][0] = 1;
    for (int r = 1; r <= n; ++r) t[n][r] = t[n - 1][r - 1] + (r <= n - 1 ? t[n - 1][r] : 0);
  }
  return t;
}

const BinomialTable& binomials() {
  static const BinomialTable table = make_binomials();
  return table;
}

// 1 / (scale * C(n, r)); the product is exact for the sizes used here.
double inverse_scaled_binomial(int scale, int n, int r) {
  return 1.0 / (static_cast<double>(scale) * static_cast<double>(binomials()[n][r]));
}

}  // namespace

int Cube::positive_count() const { return std::popcount(positive); }
int Cube::negative_count() const { return std::popcount(negative); }

double Cube::evaluate(PositionSet coalition) const {
  return ((positive & ~coalition) == 0 && (negative & coalition) == 0) ? weight : 0.0;
}

std::string Cube::to_string() const {
  std::string out = "(";
  bool first = true;
  for (int j = 0; j < 32; ++j) {
    const bool pos = (positive >> j) & 1U;
    const bool neg = (negative >> j) & 1U;
    if (!pos && !neg) continue;
    if (!first) out += " & ";
    first = false;
    if (neg) out += "!";
    out += "x" + std::to_string(j);
  }
  return out + ")";
}

const char* functional_name(Functional f) {
  switch (f) {
    case Functional::kShapley:
      return "shapley";
    case Functional::kBanzhaf:
      return "banzhaf";
    case Functional::kShapleyInteraction:
      return "interaction";
  }
  return "unknown";
}

double inverse_binomial(int n, int r) {
  if (n < 0 || n > kBinomialRows || r < 0 || r > n) {
    throw LengthError("binomial(" + std::to_string(n) + ", " + std::to_string(r) +
                      ") out of range");
  }
  return 1.0 / static_cast<double>(binomials()[n][r]);
}

double shapley_of_cube(const Cube& cube, int position) {
  if (!cube.has(position)) return 0.0;
  const int p = cube.positive_count();
  const int q = cube.negative_count();
  const int n = p + q;
  if ((cube.positive >> position) & 1U) {
    return cube.weight * inverse_scaled_binomial(n, n - 1, q);
  }
  return -cube.weight * inverse_scaled_binomial(n, n - 1, p);
}

double banzhaf_of_cube(const Cube& cube, int position) {
  if (!cube.has(position)) return 0.0;
  const int n = cube.positive_count() + cube.negative_count();
  const double magnitude = std::ldexp(cube.weight, 1 - n);
  return ((cube.positive >> position) & 1U) ? magnitude : -magnitude;
}

double shapley_interaction_of_cube(const Cube& cube, int i, int j) {
  if (i == j) throw InvalidPairError("interaction pair needs two distinct positions");
  if (!cube.has(i) || !cube.has(j)) return 0.0;
  const int p = cube.positive_count();
  const int q = cube.negative_count();
  const int n = p + q;
  const bool pi = (cube.positive >> i) & 1U;
  const bool pj = (cube.positive >> j) & 1U;
  if (pi && pj) return cube.weight * inverse_scaled_binomial(n - 1, n - 2, q);
  if (!pi && !pj) return cube.weight * inverse_scaled_binomial(n - 1, n - 2, p);
  return -cube.weight * inverse_scaled_binomial(n - 1, n - 2, p - 1);
}

double functional_of_cube(Functional functional, const Cube& cube, int position, int second) {
  switch (functional) {
    case Functional::kShapley:
      return shapley_of_cube(cube, position);
    case Functional::kBanzhaf:
      return banzhaf_of_cube(cube, position);
    case Functional::kShapleyInteraction:
      return shapley_interaction_of_cube(cube, position, second);
  }
  return 0.0;
}

MCubesMatrix::MCubesMatrix(int k, std::vector<CubeEntry> entries)
    : k_(k), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const CubeEntry& a, const CubeEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
}

const Cube* MCubesMatrix::find(std::uint32_t row, std::uint32_t col) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                             [](const CubeEntry& e, const std::pair<std::uint32_t, std::uint32_t>& key) {
                               return e.row != key.first ? e.row < key.first : e.col < key.second;
                             });
  if (it == entries_.end() || it->row != row || it->col != col) return nullptr;
  return &it->cube;
}

DenseMatrix MCubesMatrix::densify(Functional functional, int position, int second) const {
  if (k_ > kMaxDenseK) throw SizeError("densify: k too large for a dense matrix");
  DenseMatrix m(std::size_t{1} << k_);
  for (const auto& e : entries_) {
    m.at(e.row, e.col) = functional_of_cube(functional, e.cube, position, second);
  }
  return m;
}

MCubesMatrix map_patterns_to_cube(int k) {
  if (k < 0 || k > kMaxCubeMatrixK) {
    throw DepthCapError("map_patterns_to_cube: k = " + std::to_string(k) + " outside [0, " +
                        std::to_string(kMaxCubeMatrixK) + "]");
  }
  std::vector<CubeEntry> d{CubeEntry{}};
  for (int i = 0; i < k; ++i) {
    const PositionSet literal = PositionSet{1} << i;
    std::vector<CubeEntry> next;
    next.reserve(d.size() * 3);
    for (const auto& e : d) {
      const std::uint32_t r = e.row << 1;
      const std::uint32_t c = e.col << 1;
      next.push_back({r + 1, c + 0, Cube{e.cube.positive | literal, e.cube.negative, 1.0}});
      next.push_back({r + 0, c + 1, Cube{e.cube.positive, e.cube.negative | literal, 1.0}});
      next.push_back({r + 1, c + 1, e.cube});
    }
    d = std::move(next);
  }
  return MCubesMatrix(k, std::move(d));
}

std::vector<Cube> cubes_in_diagonal(int k) {
  if (k < 0 || k > kMaxDiagonalK) {
    throw DepthCapError("cubes_in_diagonal: k = " + std::to_string(k) + " outside [0, " +
                        std::to_string(kMaxDiagonalK) + "]");
  }
  std::vector<Cube> d(1);
  for (int i = 0; i < k; ++i) {
    const PositionSet literal = PositionSet{1} << i;
    std::vector<Cube> next(d.size() * 2);
    for (std::size_t a = 0; a < d.size(); ++a) {
      next[2 * a + 1] = Cube{d[a].positive | literal, d[a].negative, 1.0};
      next[2 * a] = Cube{d[a].positive, d[a].negative | literal, 1.0};
    }
    d = std::move(next);
  }
  return d;
}

}  // namespace treeshap_hd
