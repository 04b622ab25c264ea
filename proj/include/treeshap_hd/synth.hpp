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

#ifndef TREESHAP_HD_SYNTH_HPP_
#define TREESHAP_HD_SYNTH_HPP_

#include <cstdint>
#include <random>

#include "treeshap_hd/dataset.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace treeshap_hd {

// Seeded generators for validation sweeps, tests and benchmarks. Feature
// values are drawn from [0, 1); half of the draws snap to a 1/8 grid so
// that ties with grid thresholds exercise both comparison kinds.
struct RandomTreeSpec {
  int max_depth = 6;
  int n_features = 8;
  // Chance that a non-root node above max_depth becomes a leaf.
  double leaf_probability = 0.25;
  // Allow a feature to be split on again below itself.
  bool repeated_features = true;
  bool covers = true;
};

DecisionTree random_tree(std::mt19937_64& rng, const RandomTreeSpec& spec);

EnsembleModel random_model(std::mt19937_64& rng, int n_trees, const RandomTreeSpec& spec,
                           double base_score = 0.0);

Dataset random_dataset(std::mt19937_64& rng, std::size_t rows, std::size_t cols);

// Complete binary tree where every leaf sits at `depth` and no feature
// repeats along a path. Uses depth + 4 features.
EnsembleModel complete_tree_model(int depth, std::uint64_t seed);

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_SYNTH_HPP_
