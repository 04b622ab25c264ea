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

// Definition-level oracles. These enumerate coalitions directly and share no
// code with the pattern/cube/zeta path they are used to check.

#include <algorithm>
#include <bit>
#include <string>
#include <vector>

#include "treeshap_hd/engine.hpp"
#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {
namespace {

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

std::vector<int> checked_players(const EnsembleModel& model) {
  std::vector<int> players = model.active_features();
  if (static_cast<int>(players.size()) > kMaxOracleFeatures) {
    throw TooManyFeaturesError("oracle enumerates at most " + std::to_string(kMaxOracleFeatures) +
                               " active features, model uses " + std::to_string(players.size()));
  }
  return players;
}

OracleResult from_table(const std::vector<double>& table, const std::vector<int>& players,
                        int n_features, Functional functional) {
  const int n = static_cast<int>(players.size());
  const auto f = static_cast<std::size_t>(n_features);
  OracleResult out;
  out.base_value = table[0];
  if (functional == Functional::kShapleyInteraction) {
    out.values.assign(f * f, 0.0);
    const auto phi = shapley_from_table(table, n);
    const auto sii = interaction_from_table(table, n);
    for (int i = 0; i < n; ++i) {
      const auto fi = static_cast<std::size_t>(players[static_cast<std::size_t>(i)]);
      double off = 0.0;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto fj = static_cast<std::size_t>(players[static_cast<std::size_t>(j)]);
        const double v = sii[static_cast<std::size_t>(i * n + j)];
        out.values[fi * f + fj] = v;
        off += v;
      }
      out.values[fi * f + fi] = phi[static_cast<std::size_t>(i)] - off;
    }
    return out;
  }
  const auto per_player = functional == Functional::kShapley ? shapley_from_table(table, n)
                                                             : banzhaf_from_table(table, n);
  out.values.assign(f, 0.0);
  for (int i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(players[static_cast<std::size_t>(i)])] =
        per_player[static_cast<std::size_t>(i)];
  }
  return out;
}

double cover_of(const Node& n, NodeId id) {
  if (!n.cover) throw MissingCoverError("node " + std::to_string(id) + " has no cover");
  return *n.cover;
}

double expected_value(const DecisionTree& tree, NodeId id, std::span<const double> x,
                      const std::vector<char>& in_coalition) {
  const Node& n = tree.node(id);
  if (n.is_leaf) return n.weight;
  if (in_coalition[static_cast<std::size_t>(n.feature)]) {
    return expected_value(tree, n.goes_left(x[static_cast<std::size_t>(n.feature)]) ? n.left : n.right,
                          x, in_coalition);
  }
  const double c = cover_of(n, id);
  if (c <= 0.0) throw ZeroCoverError("node " + std::to_string(id) + " has zero cover");
  const double cl = cover_of(tree.node(n.left), n.left);
  const double cr = cover_of(tree.node(n.right), n.right);
  return (cl / c) * expected_value(tree, n.left, x, in_coalition) +
         (cr / c) * expected_value(tree, n.right, x, in_coalition);
}

}  // namespace

std::vector<double> shapley_from_table(std::span<const double> table, int players) {
  std::vector<double> weight(static_cast<std::size_t>(players), 0.0);
  for (int s = 0; s < players; ++s) {
    weight[static_cast<std::size_t>(s)] =
        factorial(s) * factorial(players - s - 1) / factorial(players);
  }
  std::vector<double> phi(static_cast<std::size_t>(players), 0.0);
  const std::size_t subsets = std::size_t{1} << players;
  for (int i = 0; i < players; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double sum = 0.0;
    for (std::size_t s = 0; s < subsets; ++s) {
      if (s & bit) continue;
      sum += weight[static_cast<std::size_t>(std::popcount(s))] * (table[s | bit] - table[s]);
    }
    phi[static_cast<std::size_t>(i)] = sum;
  }
  return phi;
}

std::vector<double> banzhaf_from_table(std::span<const double> table, int players) {
  std::vector<double> beta(static_cast<std::size_t>(players), 0.0);
  const std::size_t subsets = std::size_t{1} << players;
  for (int i = 0; i < players; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double sum = 0.0;
    for (std::size_t s = 0; s < subsets; ++s) {
      if (!(s & bit)) sum += table[s | bit] - table[s];
    }
    beta[static_cast<std::size_t>(i)] = sum / static_cast<double>(subsets / 2);
  }
  return beta;
}

std::vector<double> interaction_from_table(std::span<const double> table, int players) {
  const auto n = static_cast<std::size_t>(players);
  std::vector<double> out(n * n, 0.0);
  if (players < 2) return out;
  std::vector<double> weight(n - 1, 0.0);
  for (int s = 0; s + 2 <= players; ++s) {
    weight[static_cast<std::size_t>(s)] =
        factorial(s) * factorial(players - s - 2) / factorial(players - 1);
  }
  const std::size_t subsets = std::size_t{1} << players;
  for (int i = 0; i < players; ++i) {
    for (int j = i + 1; j < players; ++j) {
      const std::size_t bi = std::size_t{1} << i;
      const std::size_t bj = std::size_t{1} << j;
      double sum = 0.0;
      for (std::size_t s = 0; s < subsets; ++s) {
        if (s & (bi | bj)) continue;
        const double delta = table[s | bi | bj] - table[s | bi] - table[s | bj] + table[s];
        sum += weight[static_cast<std::size_t>(std::popcount(s))] * delta;
      }
      out[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = sum;
      out[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(i)] = sum;
    }
  }
  return out;
}

OracleResult background_shap_bruteforce(const EnsembleModel& model, std::span<const double> x,
                                        const Dataset& background, Functional functional) {
  if (background.rows() == 0) throw EmptyBackgroundError("background dataset is empty");
  const std::vector<int> players = checked_players(model);
  const int n = static_cast<int>(players.size());
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> table(subsets, 0.0);
  std::vector<double> hybrid(static_cast<std::size_t>(model.n_features()));
  for (std::size_t s = 0; s < subsets; ++s) {
    double sum = 0.0;
    for (std::size_t b = 0; b < background.rows(); ++b) {
      const auto row = background.row(b);
      std::copy(row.begin(), row.end(), hybrid.begin());
      for (int i = 0; i < n; ++i) {
        if ((s >> i) & 1U) {
          const auto f = static_cast<std::size_t>(players[static_cast<std::size_t>(i)]);
          hybrid[f] = x[f];
        }
      }
      sum += predict_row(model, hybrid);
    }
    table[s] = sum / static_cast<double>(background.rows());
  }
  return from_table(table, players, model.n_features(), functional);
}

OracleResult path_dependent_bruteforce(const EnsembleModel& model, std::span<const double> x,
                                       Functional functional) {
  const std::vector<int> players = checked_players(model);
  const int n = static_cast<int>(players.size());
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> table(subsets, 0.0);
  std::vector<char> in_coalition(static_cast<std::size_t>(model.n_features()), 0);
  for (std::size_t s = 0; s < subsets; ++s) {
    for (int i = 0; i < n; ++i) {
      in_coalition[static_cast<std::size_t>(players[static_cast<std::size_t>(i)])] =
          static_cast<char>((s >> i) & 1U);
    }
    double v = model.base_score();
    for (const auto& tree : model.trees()) v += expected_value(tree, 0, x, in_coalition);
    table[s] = v;
  }
  return from_table(table, players, model.n_features(), functional);
}

}  // namespace treeshap_hd
