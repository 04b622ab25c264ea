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

#include "treeshap_hd/synth.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace treeshap_hd {
namespace {

double draw_value(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (std::bernoulli_distribution(0.5)(rng)) {
    return static_cast<double>(std::uniform_int_distribution<int>(0, 7)(rng)) / 8.0;
  }
  return unit(rng);
}

double draw_threshold(std::mt19937_64& rng) {
  if (std::bernoulli_distribution(0.5)(rng)) {
    return static_cast<double>(std::uniform_int_distribution<int>(1, 7)(rng)) / 8.0;
  }
  return std::uniform_real_distribution<double>(0.05, 0.95)(rng);
}

struct Builder {
  std::mt19937_64& rng;
  std::vector<Node> nodes;

  NodeId add_leaf(double cover, bool covers) {
    Node leaf;
    leaf.is_leaf = true;
    leaf.weight = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    if (covers) leaf.cover = cover;
    nodes.push_back(leaf);
    return static_cast<NodeId>(nodes.size() - 1);
  }

  NodeId add_split(int feature, double cover, bool covers) {
    Node split;
    split.is_leaf = false;
    split.feature = feature;
    split.threshold = draw_threshold(rng);
    split.cmp = std::bernoulli_distribution(0.5)(rng) ? Comparison::kLess : Comparison::kLessEqual;
    if (covers) split.cover = cover;
    nodes.push_back(split);
    return static_cast<NodeId>(nodes.size() - 1);
  }

  std::pair<double, double> split_cover(double cover) {
    const double frac = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const double left = cover * frac;
    return {left, cover - left};
  }
};

void grow(Builder& b, NodeId id, int depth, const RandomTreeSpec& spec,
          std::vector<int>& path_features) {
  const auto [cl, cr] = b.split_cover(b.nodes[static_cast<std::size_t>(id)].cover.value_or(1.0));
  for (int side = 0; side < 2; ++side) {
    const double cover = side == 0 ? cl : cr;
    const bool stop = depth + 1 >= spec.max_depth ||
                      std::bernoulli_distribution(spec.leaf_probability)(b.rng);
    std::vector<int> candidates;
    for (int f = 0; f < spec.n_features; ++f) {
      if (spec.repeated_features ||
          std::find(path_features.begin(), path_features.end(), f) == path_features.end()) {
        candidates.push_back(f);
      }
    }
    NodeId child;
    if (stop || candidates.empty()) {
      child = b.add_leaf(cover, spec.covers);
    } else {
      const int feature = candidates[std::uniform_int_distribution<std::size_t>(
          0, candidates.size() - 1)(b.rng)];
      child = b.add_split(feature, cover, spec.covers);
      path_features.push_back(feature);
      grow(b, child, depth + 1, spec, path_features);
      path_features.pop_back();
    }
    Node& parent = b.nodes[static_cast<std::size_t>(id)];
    (side == 0 ? parent.left : parent.right) = child;
  }
}

}  // namespace

DecisionTree random_tree(std::mt19937_64& rng, const RandomTreeSpec& spec) {
  Builder b{rng, {}};
  const double root_cover = std::uniform_real_distribution<double>(50.0, 500.0)(rng);
  if (spec.max_depth <= 0 || spec.n_features <= 0) {
    b.add_leaf(root_cover, spec.covers);
    DecisionTree tree(std::move(b.nodes));
    tree.validate(std::max(spec.n_features, 0));
    return tree;
  }
  const int feature = std::uniform_int_distribution<int>(0, spec.n_features - 1)(rng);
  const NodeId root = b.add_split(feature, root_cover, spec.covers);
  std::vector<int> path{feature};
  grow(b, root, 0, spec, path);
  DecisionTree tree(std::move(b.nodes));
  tree.validate(spec.n_features);
  return tree;
}

EnsembleModel random_model(std::mt19937_64& rng, int n_trees, const RandomTreeSpec& spec,
                           double base_score) {
  std::vector<DecisionTree> trees;
  for (int t = 0; t < n_trees; ++t) trees.push_back(random_tree(rng, spec));
  return EnsembleModel(std::move(trees), spec.n_features, base_score);
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  Dataset data(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) data.at(r, c) = draw_value(rng);
  }
  return data;
}

EnsembleModel complete_tree_model(int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomTreeSpec spec;
  spec.max_depth = depth;
  spec.n_features = depth + 4;
  spec.leaf_probability = 0.0;
  spec.repeated_features = false;
  spec.covers = true;
  return EnsembleModel({random_tree(rng, spec)}, spec.n_features, 0.0);
}

}  // namespace treeshap_hd
