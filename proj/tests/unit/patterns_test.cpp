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

#include "treeshap_hd/patterns.hpp"

#include <bit>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "model_builders.hpp"
#include "treeshap_hd/errors.hpp"
#include "treeshap_hd/synth.hpp"

namespace treeshap_hd {
namespace {

using testing::leaf;
using testing::split;

std::vector<std::pair<NodeId, std::vector<Pattern>>> collect(const DecisionTree& tree,
                                                             const Dataset& rows,
                                                             std::size_t chunk = kDefaultChunkRows) {
  std::vector<std::pair<NodeId, std::vector<Pattern>>> out;
  UfdpGenerator gen(tree, rows, kDefaultDepthCap, chunk);
  while (auto lp = gen.next()) {
    out.emplace_back(lp->leaf, std::vector<Pattern>(lp->patterns.begin(), lp->patterns.end()));
  }
  return out;
}

DecisionTree validated(DecisionTree t, int n_features) {
  t.validate(n_features);
  return t;
}

TEST(UfdpGenerator, RepeatedFeatureMergesIntoOneBit) {
  const DecisionTree tree = validated(testing::repeated_feature_tree(), 2);
  const Dataset rows(2, 2, {3.0, 0.0, 7.0, 0.0});
  UfdpGenerator gen(tree, rows);
  auto first = gen.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->leaf, 3);
  ASSERT_EQ(first->k(), 1);
  EXPECT_EQ(first->features[0], 0);
  EXPECT_EQ(first->patterns[0], 1u);
  EXPECT_EQ(first->patterns[1], 0u);
}

TEST(UfdpGenerator, DistinctFeatures) {
  const DecisionTree tree = validated(
      DecisionTree({split(0, 0.5, 1, 2), split(1, 0.5, 3, 4), leaf(0), leaf(1), leaf(2)}), 2);
  const Dataset rows(2, 2, {0.2, 0.9, 0.2, 0.1});
  const auto leaves = collect(tree, rows);
  ASSERT_EQ(leaves.size(), 3u);
  EXPECT_EQ(leaves[0].first, 3);
  EXPECT_EQ(leaves[0].second, (std::vector<Pattern>{2u, 3u}));
  EXPECT_EQ(leaves[1].first, 4);
  EXPECT_EQ(leaves[1].second, (std::vector<Pattern>{3u, 2u}));
  EXPECT_EQ(leaves[2].first, 2);
  EXPECT_EQ(leaves[2].second, (std::vector<Pattern>{0u, 0u}));
}

TEST(CalcDecisionPatterns, Stump) {
  const EnsembleModel m = testing::stump(1, 0);
  const Dataset rows(1, 1, {0.2});
  const auto map = calc_decision_patterns(m.trees()[0], rows);
  EXPECT_EQ(map.at(1)[0], 1u);
  EXPECT_EQ(map.at(2)[0], 0u);
}

TEST(UfdpGenerator, MatchesDecisionPatternsWithoutRepeats) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const RandomTreeSpec spec{1 + trial % 6, 8, 0.2, false, false};
    const DecisionTree tree = random_tree(rng, spec);
    const Dataset rows = random_dataset(rng, 50, 8);
    const auto reference = calc_decision_patterns(tree, rows);
    for (const auto& [leaf_id, patterns] : collect(tree, rows, 7)) {
      EXPECT_EQ(patterns, reference.at(leaf_id)) << "trial " << trial << " leaf " << leaf_id;
    }
  }
}

TEST(UfdpGenerator, AllOnesCountsTheRowsReachingTheLeaf) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const DecisionTree tree = random_tree(rng, RandomTreeSpec{7, 4, 0.2, true, false});
    const Dataset rows = random_dataset(rng, 60, 4);
    UfdpGenerator gen(tree, rows, kDefaultDepthCap, 16);
    while (auto lp = gen.next()) {
      const Pattern ones = lp->k() == 0 ? 0u : (Pattern{1} << lp->k()) - 1u;
      std::size_t all_ones = 0;
      std::size_t reached = 0;
      for (std::size_t r = 0; r < rows.rows(); ++r) {
        all_ones += lp->patterns[r] == ones;
        reached += tree.leaf_for(rows.row(r)) == lp->leaf;
      }
      EXPECT_EQ(all_ones, reached);
    }
  }
}

TEST(UfdpGenerator, LeafOrderMatchesPathIterator) {
  std::mt19937_64 rng(3);
  const DecisionTree tree = random_tree(rng, RandomTreeSpec{6, 5, 0.3, true, false});
  const Dataset rows = random_dataset(rng, 5, 5);
  const auto paths = root_to_leaf_paths(tree);
  const auto leaves = collect(tree, rows);
  ASSERT_EQ(paths.size(), leaves.size());
  for (std::size_t i = 0; i < paths.size(); ++i) EXPECT_EQ(paths[i].leaf, leaves[i].first);
}

TEST(UfdpGenerator, StreamingKeepsAtMostDepthPlusOneVectors) {
  const EnsembleModel m = complete_tree_model(10, 1);
  std::mt19937_64 rng(9);
  const Dataset rows = random_dataset(rng, 32, static_cast<std::size_t>(m.n_features()));
  UfdpGenerator gen(m.trees()[0], rows);
  std::size_t leaves = 0;
  while (gen.next()) ++leaves;
  EXPECT_EQ(leaves, 1024u);
  EXPECT_LE(gen.peak_live_vectors(), 11u);
  EXPECT_GE(gen.peak_live_vectors(), 2u);
}

TEST(UfdpGenerator, DepthCap) {
  const EnsembleModel m = complete_tree_model(6, 2);
  const Dataset rows(1, static_cast<std::size_t>(m.n_features()));
  UfdpGenerator gen(m.trees()[0], rows, 5);
  EXPECT_THROW(
      {
        while (gen.next()) {
        }
      },
      DepthCapError);
}

TEST(BackgroundF, Counts) {
  const std::vector<Pattern> p{3, 3, 1, 0};
  EXPECT_EQ(background_f(p, 2).values, (std::vector<double>{0.25, 0.25, 0.0, 0.5}));
  const std::vector<Pattern> one{1};
  EXPECT_EQ(background_f(one, 1).values, (std::vector<double>{0.0, 1.0}));
  const std::vector<Pattern> same{2, 2, 2, 2};
  EXPECT_EQ(background_f(same, 2).values, (std::vector<double>{0.0, 0.0, 1.0, 0.0}));
  EXPECT_THROW(background_f(std::span<const Pattern>{}, 2), EmptyBackgroundError);
}

TEST(PathDependentF, CoverRatios) {
  const DecisionTree tree = validated(testing::repeated_feature_tree(), 2);
  const auto paths = root_to_leaf_paths(tree);
  // Leaf 3 sits under x0<10 and x0<5: r = 0.6 * 0.5.
  const FVector twice = path_dependent_f(tree, paths[0]);
  ASSERT_EQ(twice.k, 1);
  EXPECT_NEAR(twice.values[0], 0.7, 1e-15);
  EXPECT_NEAR(twice.values[1], 0.3, 1e-15);

  const EnsembleModel stump = testing::stump(1, 0);
  const FVector once = path_dependent_f(stump.trees()[0], root_to_leaf_paths(stump.trees()[0])[0]);
  EXPECT_NEAR(once.values[0], 0.4, 1e-15);
  EXPECT_NEAR(once.values[1], 0.6, 1e-15);

  const DecisionTree two = validated(DecisionTree({split(0, 0.5, 1, 2, 100.0),
                                                   split(1, 0.5, 3, 4, 50.0), leaf(0, 50.0),
                                                   leaf(1, 12.5), leaf(2, 37.5)}),
                                     2);
  const FVector f = path_dependent_f(two, root_to_leaf_paths(two)[0]);
  const std::vector<double> expected{0.375, 0.125, 0.375, 0.125};
  ASSERT_EQ(f.values.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(f.values[i], expected[i], 1e-15);
}

TEST(PathDependentF, SumsToOne) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const DecisionTree tree = random_tree(rng, RandomTreeSpec{6, 4, 0.2, true, true});
    for (const auto& path : root_to_leaf_paths(tree)) {
      const FVector f = path_dependent_f(tree, path);
      EXPECT_NEAR(std::accumulate(f.values.begin(), f.values.end(), 0.0), 1.0, 1e-12);
    }
  }
}

TEST(PathDependentF, CoverErrors) {
  const DecisionTree bare = validated(
      DecisionTree({split(0, 0.5, 1, 2), leaf(1), leaf(0)}), 1);
  EXPECT_THROW(path_dependent_f(bare, root_to_leaf_paths(bare)[0]), MissingCoverError);
  const DecisionTree zero = validated(
      DecisionTree({split(0, 0.5, 1, 2, 10.0), leaf(1, 0.0), leaf(0, 10.0)}), 1);
  EXPECT_THROW(path_dependent_f(zero, root_to_leaf_paths(zero)[0]), ZeroCoverError);
}

}  // namespace
}  // namespace treeshap_hd
