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

#ifndef TREESHAP_HD_PATTERNS_HPP_
#define TREESHAP_HD_PATTERNS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "treeshap_hd/dataset.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace treeshap_hd {

// Hard cap on unique features per path: f-vectors have 2^k entries.
inline constexpr int kDefaultDepthCap = 26;
inline constexpr int kMaxDepthCap = 30;
inline constexpr std::size_t kDefaultChunkRows = 4096;

// One bit per unique path feature; the root's feature is the most
// significant of the k bits. A bit is 1 iff every split on that feature
// along the path routes the row towards the leaf.
using Pattern = std::uint32_t;

// Patterns of every row at one leaf. Views are valid until the generator
// advances.
struct LeafPatterns {
  NodeId leaf = kNoNode;
  std::span<const int> features;  // first-appearance order
  std::span<const Pattern> patterns;

  int k() const { return static_cast<int>(features.size()); }
};

// Streams unique-feature decision patterns leaf by leaf in depth-first,
// left-first order. Only the patterns of pending right siblings and of the
// node being expanded are held, so at most depth + 1 pattern vectors are
// alive at once.
class UfdpGenerator {
 public:
  UfdpGenerator(const DecisionTree& tree, const Dataset& rows, int depth_cap = kDefaultDepthCap,
                std::size_t chunk_rows = kDefaultChunkRows);

  std::optional<LeafPatterns> next();

  std::size_t live_vectors() const { return live_; }
  std::size_t peak_live_vectors() const { return peak_live_; }
  std::size_t peak_bytes() const { return peak_live_ * rows_->rows() * sizeof(Pattern); }

 private:
  struct Frame {
    NodeId node;
    std::vector<int> features;
    std::vector<Pattern> patterns;
  };

  std::vector<Pattern> acquire();
  void release(std::vector<Pattern>& v);
  void evaluate_split(const Node& n, std::vector<std::uint8_t>& out) const;

  const DecisionTree* tree_;
  const Dataset* rows_;
  int depth_cap_;
  std::size_t chunk_rows_;
  std::vector<Frame> stack_;
  std::optional<Frame> current_;
  std::vector<std::uint8_t> split_;
  std::size_t live_ = 0;
  std::size_t peak_live_ = 0;
};

// Plain decision patterns: one bit per path node, root bit most significant.
// Kept as a reference for trees without repeated features, where it agrees
// with UfdpGenerator. Holds the patterns of every node, O(nodes * rows).
std::map<NodeId, std::vector<Pattern>> calc_decision_patterns(const DecisionTree& tree,
                                                              const Dataset& rows,
                                                              int depth_cap = kDefaultDepthCap);

enum class FMode : std::uint8_t { kBackground, kPathDependent };

// Distribution over background patterns at one leaf, 2^k entries.
struct FVector {
  std::vector<double> values;
  FMode mode = FMode::kBackground;
  int k = 0;
};

// Normalised pattern counts over the background rows.
FVector background_f(std::span<const Pattern> patterns, int k);

// Cover-ratio form: entry u is the product over unique features i of r_i when
// bit i of u is set and 1 - r_i otherwise, where r_i multiplies
// cover(child on path) / cover(node) over every node splitting on feature i.
FVector path_dependent_f(const DecisionTree& tree, const LeafPath& path);

// Unique features of a path in first-appearance order.
std::vector<int> unique_path_features(const DecisionTree& tree, const LeafPath& path);

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_PATTERNS_HPP_
