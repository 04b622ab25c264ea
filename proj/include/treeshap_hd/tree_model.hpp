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

#ifndef TREESHAP_HD_TREE_MODEL_HPP_
#define TREESHAP_HD_TREE_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeshap_hd/dataset.hpp"

namespace treeshap_hd {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Comparison used by a split. Canonical models use `lt` (value < threshold
// goes left); the LightGBM importer uses `le`.
enum class Comparison : std::uint8_t { kLess, kLessEqual };

struct Node {
  bool is_leaf = true;
  // Split fields.
  int feature = -1;
  double threshold = 0.0;
  Comparison cmp = Comparison::kLess;
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  // Leaf field.
  double weight = 0.0;
  // Training-sample weight reaching this node, when known.
  std::optional<double> cover;

  bool goes_left(double value) const {
    return cmp == Comparison::kLess ? value < threshold : value <= threshold;
  }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  // Takes a flat node array with node 0 as root. Call validate() before use.
  explicit DecisionTree(std::vector<Node> nodes);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t num_leaves() const;

  // Longest root-to-leaf edge count (0 for a single leaf).
  int max_path_depth() const { return max_path_depth_; }
  // Largest number of distinct features on any root-to-leaf path.
  int max_unique_features() const { return max_unique_features_; }

  // Checks structure, finiteness and cover consistency; fills the depth
  // statistics. Throws ValidationError or FeatureIndexError.
  void validate(int n_features);

  NodeId leaf_for(std::span<const double> row) const;
  double predict_row(std::span<const double> row) const;

  // True when every node carries a cover.
  bool has_covers() const;

 private:
  std::vector<Node> nodes_;
  int max_path_depth_ = 0;
  int max_unique_features_ = 0;
};

class EnsembleModel {
 public:
  EnsembleModel() = default;
  EnsembleModel(std::vector<DecisionTree> trees, int n_features, double base_score,
                std::vector<std::string> feature_names = {});

  const std::vector<DecisionTree>& trees() const { return trees_; }
  int n_features() const { return n_features_; }
  double base_score() const { return base_score_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  int max_path_depth() const;
  int max_unique_features() const;
  // Sorted distinct feature ids used by any split.
  std::vector<int> active_features() const;

  // Validates all trees; called by the constructor.
  void validate();

 private:
  std::vector<DecisionTree> trees_;
  int n_features_ = 0;
  double base_score_ = 0.0;
  std::vector<std::string> feature_names_;
};

// base_score + sum of reached-leaf weights, per row. Throws NaNInputError on
// non-finite input and ValidationError on a column-count mismatch.
std::vector<double> predict(const EnsembleModel& model, const Dataset& rows);
double predict_row(const EnsembleModel& model, std::span<const double> row);

// Canonical JSON model document. Field names are normative:
//   {"n_features": int, "base_score": real, "feature_names": [str]?,
//    "trees": [[node, ...], ...]}
//   split node: {"kind": "split", "feature", "threshold", "cmp": "lt"|"le",
//                "left", "right", "cover"?}
//   leaf node:  {"kind": "leaf", "weight", "cover"?}
EnsembleModel load_canonical(const std::string& path);
EnsembleModel parse_canonical(const std::string& text);
std::string dump_canonical(const EnsembleModel& model);
void save_canonical(const EnsembleModel& model, const std::string& path);

// Reads a LightGBM text dump. Categorical splits, zero-as-missing splits,
// multi-class models and averaged (random forest) output are rejected with
// UnsupportedFeatureError.
EnsembleModel load_lightgbm_text(const std::string& path);
EnsembleModel parse_lightgbm_text(const std::string& text);

struct LeafPath {
  NodeId leaf = kNoNode;
  // Internal nodes from the root down to the leaf's parent.
  std::vector<NodeId> nodes;
};

// Depth-first, left-before-right iteration over root-to-leaf paths. Yields
// leaves in the same order as UfdpGenerator.
class RootToLeafPaths {
 public:
  explicit RootToLeafPaths(const DecisionTree& tree);
  bool next(LeafPath& out);

 private:
  const DecisionTree* tree_;
  std::vector<std::pair<NodeId, std::size_t>> stack_;  // (node, depth)
  std::vector<NodeId> path_;
};

std::vector<LeafPath> root_to_leaf_paths(const DecisionTree& tree);

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_TREE_MODEL_HPP_
