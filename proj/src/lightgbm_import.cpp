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

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "treeshap_hd/errors.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace treeshap_hd {
namespace {

constexpr int kCategoricalMask = 1;

using Block = std::map<std::string, std::string, std::less<>>;

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <typename T>
std::vector<T> parse_list(const Block& block, std::string_view key, const std::string& where) {
  auto it = block.find(key);
  if (it == block.end()) throw ParseError(where + ": missing '" + std::string(key) + "'");
  std::vector<T> out;
  std::string_view s = it->second;
  while (!s.empty()) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (s.empty()) break;
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) {
      throw ParseError(where + ": bad value in '" + std::string(key) + "'");
    }
    out.push_back(v);
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  }
  return out;
}

template <typename T>
T parse_scalar(const Block& block, std::string_view key, const std::string& where) {
  auto values = parse_list<T>(block, key, where);
  if (values.size() != 1) throw ParseError(where + ": '" + std::string(key) + "' is not a scalar");
  return values.front();
}

DecisionTree convert_tree(const Block& block, int n_features, const std::string& where) {
  const int num_leaves = parse_scalar<int>(block, "num_leaves", where);
  if (num_leaves < 1) throw ParseError(where + ": num_leaves must be positive");
  if (auto it = block.find("num_cat"); it != block.end() && strip(it->second) != "0") {
    throw UnsupportedFeatureError(where + ": categorical splits are not supported");
  }
  if (auto it = block.find("is_linear"); it != block.end() && strip(it->second) != "0") {
    throw UnsupportedFeatureError(where + ": linear trees are not supported");
  }
  const auto leaf_value = parse_list<double>(block, "leaf_value", where);
  if (leaf_value.size() != static_cast<std::size_t>(num_leaves)) {
    throw ParseError(where + ": leaf_value length mismatch");
  }
  std::vector<double> leaf_count;
  if (block.count("leaf_count")) leaf_count = parse_list<double>(block, "leaf_count", where);

  const int n_internal = num_leaves - 1;
  std::vector<Node> nodes(static_cast<std::size_t>(n_internal + num_leaves));
  auto leaf_index = [&](int j) { return static_cast<NodeId>(n_internal + j); };
  for (int j = 0; j < num_leaves; ++j) {
    Node& leaf = nodes[static_cast<std::size_t>(leaf_index(j))];
    leaf.is_leaf = true;
    leaf.weight = leaf_value[static_cast<std::size_t>(j)];
    if (leaf_count.size() == static_cast<std::size_t>(num_leaves)) {
      leaf.cover = leaf_count[static_cast<std::size_t>(j)];
    }
  }
  if (n_internal == 0) return DecisionTree(std::move(nodes));

  const auto split_feature = parse_list<int>(block, "split_feature", where);
  const auto threshold = parse_list<double>(block, "threshold", where);
  const auto decision_type = parse_list<int>(block, "decision_type", where);
  const auto left_child = parse_list<int>(block, "left_child", where);
  const auto right_child = parse_list<int>(block, "right_child", where);
  std::vector<double> internal_count;
  if (block.count("internal_count")) {
    internal_count = parse_list<double>(block, "internal_count", where);
  }
  const auto n = static_cast<std::size_t>(n_internal);
  if (split_feature.size() != n || threshold.size() != n || decision_type.size() != n ||
      left_child.size() != n || right_child.size() != n) {
    throw ParseError(where + ": split array lengths do not match num_leaves - 1");
  }
  auto child_index = [&](int c) -> NodeId {
    if (c < 0) {
      const int j = ~c;
      if (j >= num_leaves) throw ParseError(where + ": leaf reference out of range");
      return leaf_index(j);
    }
    if (c >= n_internal) throw ParseError(where + ": node reference out of range");
    return static_cast<NodeId>(c);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const int dt = decision_type[i];
    if (dt & kCategoricalMask) {
      throw UnsupportedFeatureError(where + ": categorical split at node " + std::to_string(i));
    }
    const int missing_type = (dt >> 2) & 3;
    // 0 = none, 1 = zero-as-missing, 2 = NaN-as-missing. NaN inputs are
    // rejected up front, so only zero-as-missing changes routing.
    if (missing_type == 1) {
      throw UnsupportedFeatureError(where + ": zero-as-missing default path at node " +
                                    std::to_string(i));
    }
    if (split_feature[i] < 0 || split_feature[i] >= n_features) {
      throw FeatureIndexError(where + ": split feature " + std::to_string(split_feature[i]) +
                              " out of range");
    }
    Node& node = nodes[i];
    node.is_leaf = false;
    node.feature = split_feature[i];
    node.threshold = threshold[i];
    node.cmp = Comparison::kLessEqual;
    node.left = child_index(left_child[i]);
    node.right = child_index(right_child[i]);
    if (internal_count.size() == n) node.cover = internal_count[i];
  }
  return DecisionTree(std::move(nodes));
}

}  // namespace

EnsembleModel parse_lightgbm_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Block header;
  std::vector<Block> trees;
  Block* current = &header;
  bool saw_header = false;
  while (std::getline(in, line)) {
    std::string_view s = strip(line);
    if (s.empty()) continue;
    if (s == "tree") {
      saw_header = true;
      continue;
    }
    if (s == "end of trees") break;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      if (s == "average_output") {
        throw UnsupportedFeatureError("lightgbm: averaged (random forest) output is not supported");
      }
      continue;
    }
    const std::string key(s.substr(0, eq));
    if (key == "Tree") {
      trees.emplace_back();
      current = &trees.back();
      continue;
    }
    (*current)[key] = std::string(s.substr(eq + 1));
  }
  if (!saw_header) throw ParseError("lightgbm: missing 'tree' header");

  if (auto it = header.find("num_class"); it != header.end() && strip(it->second) != "1") {
    throw UnsupportedFeatureError("lightgbm: multi-class models are not supported");
  }
  if (auto it = header.find("num_tree_per_iteration");
      it != header.end() && strip(it->second) != "1") {
    throw UnsupportedFeatureError("lightgbm: multi-output models are not supported");
  }
  const int max_feature_idx = parse_scalar<int>(header, "max_feature_idx", "lightgbm header");
  const int n_features = max_feature_idx + 1;
  std::vector<std::string> names;
  if (auto it = header.find("feature_names"); it != header.end()) {
    std::istringstream ns(it->second);
    std::string name;
    while (ns >> name) names.push_back(name);
    if (names.size() != static_cast<std::size_t>(n_features)) names.clear();
  }

  std::vector<DecisionTree> converted;
  converted.reserve(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    converted.push_back(convert_tree(trees[t], n_features, "lightgbm tree " + std::to_string(t)));
  }
  return EnsembleModel(std::move(converted), n_features, 0.0, std::move(names));
}

EnsembleModel load_lightgbm_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("lightgbm: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lightgbm_text(buf.str());
}

}  // namespace treeshap_hd
