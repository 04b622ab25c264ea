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

// Test-only reference implementations. Nothing here calls into the
// pattern, cube or zeta code paths under test.

#ifndef TREESHAP_HD_TESTS_GAME_ORACLES_HPP_
#define TREESHAP_HD_TESTS_GAME_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace treeshap_hd::testing {

inline double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }

// Game of one cube over `players` players: 1 iff every positive player is
// in S and no negative player is.
inline std::vector<double> cube_game(int players, std::uint32_t positive, std::uint32_t negative,
                                     double weight = 1.0) {
  std::vector<double> v(std::size_t{1} << players);
  for (std::size_t s = 0; s < v.size(); ++s) {
    v[s] = ((positive & ~s) == 0 && (negative & s) == 0) ? weight : 0.0;
  }
  return v;
}

inline double shapley(const std::vector<double>& v, int players, int i) {
  double sum = 0.0;
  const std::size_t bit = std::size_t{1} << i;
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (s & bit) continue;
    const int size = static_cast<int>(__builtin_popcountll(s));
    sum += fact(size) * fact(players - size - 1) / fact(players) * (v[s | bit] - v[s]);
  }
  return sum;
}

// Average marginal contribution over all player orderings.
inline double shapley_by_permutations(const std::vector<double>& v, int players, int i) {
  std::vector<int> order(static_cast<std::size_t>(players));
  std::iota(order.begin(), order.end(), 0);
  double sum = 0.0;
  double count = 0.0;
  do {
    std::size_t before = 0;
    for (int p : order) {
      if (p == i) break;
      before |= std::size_t{1} << p;
    }
    sum += v[before | (std::size_t{1} << i)] - v[before];
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  return sum / count;
}

inline double banzhaf(const std::vector<double>& v, int players, int i) {
  double sum = 0.0;
  const std::size_t bit = std::size_t{1} << i;
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (!(s & bit)) sum += v[s | bit] - v[s];
  }
  return sum / std::ldexp(1.0, players - 1);
}

inline double interaction(const std::vector<double>& v, int players, int i, int j) {
  double sum = 0.0;
  const std::size_t bi = std::size_t{1} << i;
  const std::size_t bj = std::size_t{1} << j;
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (s & (bi | bj)) continue;
    const int size = static_cast<int>(__builtin_popcountll(s));
    const double w = fact(size) * fact(players - size - 2) / fact(players - 1);
    sum += w * (v[s | bi | bj] - v[s | bi] - v[s | bj] + v[s]);
  }
  return sum;
}

}  // namespace treeshap_hd::testing

#endif  // TREESHAP_HD_TESTS_GAME_ORACLES_HPP_
