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

#include "treeshap_hd/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {

using nlohmann::json;

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf; }));
}

bool DecisionTree::has_covers() const {
  return std::all_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.cover.has_value(); });
}

void DecisionTree::validate(int n_features) {
  if (nodes_.empty()) throw ValidationError("tree has no nodes");
  const auto count = static_cast<NodeId>(nodes_.size());
  std::vector<char> seen(nodes_.size(), 0);

  struct Frame {
    NodeId id;
    int depth;
    std::vector<int> features;
  };
  std::vector<Frame> stack{{0, 0, {}}};
  seen[0] = 1;
  std::size_t reached = 1;
  max_path_depth_ = 0;
  max_unique_features_ = 0;

  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const Node& n = node(frame.id);
    const std::string where = "node " + std::to_string(frame.id);
    if (n.cover && (!std::isfinite(*n.cover) || *n.cover < 0.0)) {
      throw ValidationError(where + ": cover must be finite and non-negative");
    }
    if (n.is_leaf) {
      if (!std::isfinite(n.weight)) throw ValidationError(where + ": leaf weight not finite");
      max_path_depth_ = std::max(max_path_depth_, frame.depth);
      max_unique_features_ =
          std::max(max_unique_features_, static_cast<int>(frame.features.size()));
      continue;
    }
    if (n.feature < 0 || n.feature >= n_features) {
      throw FeatureIndexError(where + ": feature " + std::to_string(n.feature) +
                              " outside [0, " + std::to_string(n_features) + ")");
    }
    if (!std::isfinite(n.threshold)) throw ValidationError(where + ": threshold not finite");
    for (NodeId child : {n.left, n.right}) {
      if (child < 0 || child >= count) {
        throw ValidationError(where + ": dangling child reference " + std::to_string(child));
      }
      if (seen[static_cast<std::size_t>(child)]) {
        throw ValidationError(where + ": node " + std::to_string(child) +
                              " is reachable more than once");
      }
      seen[static_cast<std::size_t>(child)] = 1;
      ++reached;
    }
    const Node& l = node(n.left);
    const Node& r = node(n.right);
    if (n.cover && l.cover && r.cover) {
      const double c = *n.cover;
      if (*l.cover > c * (1.0 + 1e-12) || *r.cover > c * (1.0 + 1e-12)) {
        throw ValidationError(where + ": child cover exceeds parent cover");
      }
      if (std::fabs(*l.cover + *r.cover - c) > 1e-6 * std::max(c, 1e-300)) {
        throw ValidationError(where + ": child covers do not sum to parent cover");
      }
    }
    std::vector<int> features = frame.features;
    if (std::find(features.begin(), features.end(), n.feature) == features.end()) {
      features.push_back(n.feature);
    }
    stack.push_back({n.right, frame.depth + 1, features});
    stack.push_back({n.left, frame.depth + 1, std::move(features)});
  }
  if (reached != nodes_.size()) {
    throw ValidationError("tree has " + std::to_string(nodes_.size() - reached) +
                          " unreachable nodes");
  }
}

NodeId DecisionTree::leaf_for(std::span<const double> row) const {
  NodeId id = 0;
  while (!node(id).is_leaf) {
    const Node& n = node(id);
    id = n.goes_left(row[static_cast<std::size_t>(n.feature)]) ? n.left : n.right;
  }
  return id;
}

double DecisionTree::predict_row(std::span<const double> row) const {
  return node(leaf_for(row)).weight;
}

EnsembleModel::EnsembleModel(std::vector<DecisionTree> trees, int n_features, double base_score,
                             std::vector<std::string> feature_names)
    : trees_(std::move(trees)),
      n_features_(n_features),
      base_score_(base_score),
      feature_names_(std::move(feature_names)) {
  validate();
}

void EnsembleModel::validate() {
  if (n_features_ < 0) throw ValidationError("n_features must be non-negative");
  if (!std::isfinite(base_score_)) throw ValidationError("base_score not finite");
  if (!feature_names_.empty() && feature_names_.size() != static_cast<std::size_t>(n_features_)) {
    throw ValidationError("feature_names has " + std::to_string(feature_names_.size()) +
                          " entries for " + std::to_string(n_features_) + " features");
  }
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    try {
      trees_[t].validate(n_features_);
    } catch (const FeatureIndexError& e) {
      throw FeatureIndexError("tree " + std::to_string(t) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("tree " + std::to_string(t) + ": " + e.what());
    }
  }
}

int EnsembleModel::max_path_depth() const {
  int d = 0;
  for (const auto& t : trees_) d = std::max(d, t.max_path_depth());
  return d;
}

int EnsembleModel::max_unique_features() const {
  int k = 0;
  for (const auto& t : trees_) k = std::max(k, t.max_unique_features());
  return k;
}

std::vector<int> EnsembleModel::active_features() const {
  std::set<int> used;
  for (const auto& t : trees_) {
    for (const auto& n : t.nodes()) {
      if (!n.is_leaf) used.insert(n.feature);
    }
  }
  return {used.begin(), used.end()};
}

double predict_row(const EnsembleModel& model, std::span<const double> row) {
  double sum = model.base_score();
  for (const auto& t : model.trees()) sum += t.predict_row(row);
  return sum;
}

std::vector<double> predict(const EnsembleModel& model, const Dataset& rows) {
  if (rows.cols() != static_cast<std::size_t>(model.n_features())) {
    throw ValidationError("dataset has " + std::to_string(rows.cols()) + " columns, model expects " +
                          std::to_string(model.n_features()));
  }
  rows.require_finite();
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = predict_row(model, rows.row(r));
  return out;
}

// ---------------------------------------------------------------------------
// Canonical JSON format.

namespace {

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": field '" + key + "' has the wrong type");
  }
}

Node parse_node(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": node must be an object");
  Node n;
  const auto kind = field<std::string>(j, "kind", where);
  if (j.contains("cover") && !j["cover"].is_null()) n.cover = field<double>(j, "cover", where);
  if (kind == "leaf") {
    n.is_leaf = true;
    n.weight = field<double>(j, "weight", where);
    return n;
  }
  if (kind != "split") throw ParseError(where + ": unknown node kind '" + kind + "'");
  n.is_leaf = false;
  n.feature = field<int>(j, "feature", where);
  // Non-finite thresholds can only arrive as null or strings in JSON; reject
  // them as invariant violations rather than type errors.
  const auto& thr = j.find("threshold");
  if (thr == j.end()) throw ParseError(where + ": missing field 'threshold'");
  if (thr->is_number()) {
    n.threshold = thr->get<double>();
  } else if (thr->is_null() || thr->is_string()) {
    throw ValidationError(where + ": threshold is not a finite number");
  } else {
    throw ParseError(where + ": field 'threshold' has the wrong type");
  }
  n.left = field<NodeId>(j, "left", where);
  n.right = field<NodeId>(j, "right", where);
  const std::string cmp = j.contains("cmp") ? field<std::string>(j, "cmp", where) : "lt";
  if (cmp == "lt") {
    n.cmp = Comparison::kLess;
  } else if (cmp == "le") {
    n.cmp = Comparison::kLessEqual;
  } else {
    throw ParseError(where + ": unknown cmp '" + cmp + "'");
  }
  return n;
}

}  // namespace

EnsembleModel parse_canonical(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model: top level must be an object");
  const int n_features = field<int>(doc, "n_features", "model");
  const double base_score = doc.contains("base_score") ? field<double>(doc, "base_score", "model") : 0.0;
  std::vector<std::string> names;
  if (doc.contains("feature_names") && !doc["feature_names"].is_null()) {
    names = field<std::vector<std::string>>(doc, "feature_names", "model");
  }
  const auto& trees_json = doc.find("trees");
  if (trees_json == doc.end() || !trees_json->is_array()) {
    throw ParseError("model: 'trees' must be an array");
  }
  std::vector<DecisionTree> trees;
  for (std::size_t t = 0; t < trees_json->size(); ++t) {
    const json& tj = (*trees_json)[t];
    const std::string where = "tree " + std::to_string(t);
    if (!tj.is_array()) throw ParseError(where + ": must be a node array");
    std::vector<Node> nodes;
    nodes.reserve(tj.size());
    for (std::size_t i = 0; i < tj.size(); ++i) {
      nodes.push_back(parse_node(tj[i], where + " node " + std::to_string(i)));
    }
    trees.emplace_back(std::move(nodes));
  }
  return EnsembleModel(std::move(trees), n_features, base_score, std::move(names));
}

EnsembleModel load_canonical(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("model: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_canonical(buf.str());
}

std::string dump_canonical(const EnsembleModel& model) {
  json doc;
  doc["n_features"] = model.n_features();
  doc["base_score"] = model.base_score();
  if (!model.feature_names().empty()) doc["feature_names"] = model.feature_names();
  json trees = json::array();
  for (const auto& tree : model.trees()) {
    json nodes = json::array();
    for (const auto& n : tree.nodes()) {
      json j;
      if (n.is_leaf) {
        j["kind"] = "leaf";
        j["weight"] = n.weight;
      } else {
        j["kind"] = "split";
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["cmp"] = n.cmp == Comparison::kLess ? "lt" : "le";
        j["left"] = n.left;
        j["right"] = n.right;
      }
      if (n.cover) j["cover"] = *n.cover;
      nodes.push_back(std::move(j));
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  return doc.dump(1);
}

void save_canonical(const EnsembleModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("model: cannot write " + path);
  out << dump_canonical(model) << '\n';
}

// ---------------------------------------------------------------------------

RootToLeafPaths::RootToLeafPaths(const DecisionTree& tree) : tree_(&tree) {
  if (tree.size() > 0) stack_.emplace_back(0, 0);
}

bool RootToLeafPaths::next(LeafPath& out) {
  while (!stack_.empty()) {
    auto [id, depth] = stack_.back();
    stack_.pop_back();
    path_.resize(depth);
    const Node& n = tree_->node(id);
    if (n.is_leaf) {
      out.leaf = id;
      out.nodes = path_;
      return true;
    }
    path_.push_back(id);
    stack_.emplace_back(n.right, depth + 1);
    stack_.emplace_back(n.left, depth + 1);
  }
  return false;
}

std::vector<LeafPath> root_to_leaf_paths(const DecisionTree& tree) {
  std::vector<LeafPath> out;
  RootToLeafPaths it(tree);
  LeafPath p;
  while (it.next(p)) out.push_back(p);
  return out;
}

}  // namespace treeshap_hd
