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

#include <algorithm>
#include <deque>
#include <string>
#include <utility>

#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {

UfdpGenerator::UfdpGenerator(const DecisionTree& tree, const Dataset& rows, int depth_cap,
                             std::size_t chunk_rows)
    : tree_(&tree),
      rows_(&rows),
      depth_cap_(std::min(depth_cap, kMaxDepthCap)),
      chunk_rows_(std::max<std::size_t>(chunk_rows, 1)) {
  if (tree.size() == 0) return;
  stack_.push_back({0, {}, acquire()});
}

std::vector<Pattern> UfdpGenerator::acquire() {
  ++live_;
  peak_live_ = std::max(peak_live_, live_);
  return std::vector<Pattern>(rows_->rows(), 0);
}

void UfdpGenerator::release(std::vector<Pattern>& v) {
  std::vector<Pattern>().swap(v);
  --live_;
}

void UfdpGenerator::evaluate_split(const Node& n, std::vector<std::uint8_t>& out) const {
  const std::size_t rows = rows_->rows();
  out.resize(rows);
  const auto feature = static_cast<std::size_t>(n.feature);
  for (std::size_t begin = 0; begin < rows; begin += chunk_rows_) {
    const std::size_t end = std::min(rows, begin + chunk_rows_);
    for (std::size_t r = begin; r < end; ++r) {
      out[r] = n.goes_left(rows_->at(r, feature)) ? 1 : 0;
    }
  }
}

std::optional<LeafPatterns> UfdpGenerator::next() {
  if (current_) {
    release(current_->patterns);
    current_.reset();
  }
  while (!stack_.empty()) {
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    const Node& n = tree_->node(frame.node);
    if (n.is_leaf) {
      current_ = std::move(frame);
      return LeafPatterns{current_->node, current_->features, current_->patterns};
    }

    evaluate_split(n, split_);
    std::vector<Pattern> left = acquire();
    std::vector<Pattern>& right = frame.patterns;
    const std::size_t rows = rows_->rows();
    auto pos = std::find(frame.features.begin(), frame.features.end(), n.feature);
    if (pos == frame.features.end()) {
      if (static_cast<int>(frame.features.size()) + 1 > depth_cap_) {
        throw DepthCapError("path to node " + std::to_string(n.left) + " has more than " +
                            std::to_string(depth_cap_) + " unique features");
      }
      for (std::size_t r = 0; r < rows; ++r) {
        const Pattern shifted = right[r] << 1;
        left[r] = shifted | split_[r];
        right[r] = shifted | (split_[r] ^ 1U);
      }
      frame.features.push_back(n.feature);
    } else {
      const auto k = frame.features.size();
      const auto index = static_cast<std::size_t>(pos - frame.features.begin());
      const Pattern keep = ~(Pattern{1} << (k - 1 - index));
      for (std::size_t r = 0; r < rows; ++r) {
        const Pattern p = right[r];
        left[r] = split_[r] ? p : (p & keep);
        right[r] = split_[r] ? (p & keep) : p;
      }
    }
    std::vector<int> left_features = frame.features;
    stack_.push_back({n.right, std::move(frame.features), std::move(right)});
    stack_.push_back({n.left, std::move(left_features), std::move(left)});
  }
  return std::nullopt;
}

std::map<NodeId, std::vector<Pattern>> calc_decision_patterns(const DecisionTree& tree,
                                                              const Dataset& rows,
                                                              int depth_cap) {
  if (tree.max_path_depth() > std::min(depth_cap, kMaxDepthCap)) {
    throw DepthCapError("tree depth " + std::to_string(tree.max_path_depth()) +
                        " exceeds cap " + std::to_string(depth_cap));
  }
  std::map<NodeId, std::vector<Pattern>> leaves;
  std::map<NodeId, std::vector<Pattern>> all;
  all[0] = std::vector<Pattern>(rows.rows(), 0);
  std::deque<NodeId> queue{0};
  while (!queue.empty()) {
    const NodeId id = queue.front();
    queue.pop_front();
    const Node& n = tree.node(id);
    if (n.is_leaf) {
      leaves[id] = all[id];
      continue;
    }
    const auto& parent = all[id];
    std::vector<Pattern> left(rows.rows());
    std::vector<Pattern> right(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      const Pattern s = n.goes_left(rows.at(r, static_cast<std::size_t>(n.feature))) ? 1 : 0;
      left[r] = (parent[r] << 1) + s;
      right[r] = (parent[r] << 1) + (s ^ 1U);
    }
    all[n.left] = std::move(left);
    all[n.right] = std::move(right);
    queue.push_back(n.left);
    queue.push_back(n.right);
  }
  return leaves;
}

FVector background_f(std::span<const Pattern> patterns, int k) {
  if (patterns.empty()) throw EmptyBackgroundError("background dataset is empty");
  if (k < 0 || k > kMaxDepthCap) {
    throw DepthCapError("unique feature count " + std::to_string(k) + " out of range");
  }
  FVector f;
  f.mode = FMode::kBackground;
  f.k = k;
  f.values.assign(std::size_t{1} << k, 0.0);
  std::vector<std::size_t> counts(f.values.size(), 0);
  for (Pattern p : patterns) ++counts[p];
  const double m = static_cast<double>(patterns.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f.values[i] = static_cast<double>(counts[i]) / m;
  }
  return f;
}

std::vector<int> unique_path_features(const DecisionTree& tree, const LeafPath& path) {
  std::vector<int> features;
  for (NodeId id : path.nodes) {
    const int f = tree.node(id).feature;
    if (std::find(features.begin(), features.end(), f) == features.end()) features.push_back(f);
  }
  return features;
}

FVector path_dependent_f(const DecisionTree& tree, const LeafPath& path) {
  const std::vector<int> features = unique_path_features(tree, path);
  const int k = static_cast<int>(features.size());
  if (k > kMaxDepthCap) throw DepthCapError("too many unique features on path");
  std::vector<double> ratio(features.size(), 1.0);
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const NodeId id = path.nodes[i];
    const NodeId child = i + 1 < path.nodes.size() ? path.nodes[i + 1] : path.leaf;
    const Node& n = tree.node(id);
    const Node& c = tree.node(child);
    if (!n.cover || !c.cover) {
      throw MissingCoverError("node " + std::to_string(n.cover ? child : id) +
                              " on the path to leaf " + std::to_string(path.leaf) +
                              " has no cover");
    }
    if (*c.cover <= 0.0) {
      throw ZeroCoverError("node " + std::to_string(child) + " on the path to leaf " +
                           std::to_string(path.leaf) + " has zero cover");
    }
    const auto pos = std::find(features.begin(), features.end(), n.feature) - features.begin();
    ratio[static_cast<std::size_t>(pos)] *= *c.cover / *n.cover;
  }

  FVector f;
  f.mode = FMode::kPathDependent;
  f.k = k;
  f.values.assign(std::size_t{1} << k, 0.0);
  f.values[0] = 1.0;
  // Feature i is appended as the next lower bit, so the first feature ends
  // up most significant.
  std::size_t len = 1;
  for (int i = 0; i < k; ++i) {
    const double r = ratio[static_cast<std::size_t>(i)];
    for (std::size_t u = len; u-- > 0;) {
      const double base = f.values[u];
      f.values[2 * u + 1] = base * r;
      f.values[2 * u] = base * (1.0 - r);
    }
    len *= 2;
  }
  return f;
}

}  // namespace treeshap_hd
