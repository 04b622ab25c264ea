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

#include "treeshap_hd/diagonal_cache.hpp"

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {
namespace {

TEST(DiagonalCache, ShapleyDepthOne) {
  const DiagonalCache c = compute_ms(1, Functional::kShapley);
  const auto v = c.vector(1, 0);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], -1.0);
  EXPECT_EQ(v[1], 1.0);
}

TEST(DiagonalCache, ShapleyDepthTwo) {
  const DiagonalCache c = compute_ms(2, Functional::kShapley);
  EXPECT_EQ(c.vector(2, 0)[3], 0.5);
  EXPECT_EQ(c.vector(2, 1)[3], 0.5);
  EXPECT_EQ(c.entries(), 2u * 1 + 4u * 2);
  EXPECT_EQ(c.entries(), DiagonalCache::entries_for(Functional::kShapley, 2));
}

TEST(DiagonalCache, BanzhafDepthTwo) {
  const DiagonalCache c = compute_ms(2, Functional::kBanzhaf);
  const auto v = c.vector(2, 0);
  EXPECT_EQ(std::vector<double>(v.begin(), v.end()), (std::vector<double>{-0.5, -0.5, 0.5, 0.5}));
}

TEST(DiagonalCache, PairSlots) {
  EXPECT_EQ(DiagonalCache::pair_slot(4, 0, 1), 0);
  EXPECT_EQ(DiagonalCache::pair_slot(4, 0, 3), 2);
  EXPECT_EQ(DiagonalCache::pair_slot(4, 1, 2), 3);
  EXPECT_EQ(DiagonalCache::pair_slot(4, 2, 3), 5);
  const DiagonalCache c = compute_ms(3, Functional::kShapleyInteraction);
  EXPECT_EQ(c.slots(1), 0);
  EXPECT_EQ(c.slots(3), 3);
  // Row 11 for k=2 is the AND cube.
  EXPECT_EQ(c.vector(2, 0)[3], 1.0);
  EXPECT_EQ(c.vector(2, 0)[2], -1.0);
}

TEST(DiagonalCache, Errors) {
  EXPECT_THROW(compute_ms(10, Functional::kShapley, 1024), OutOfMemoryBudget);
  EXPECT_THROW(compute_ms(kMaxDiagonalK + 1, Functional::kShapley), DepthCapError);
}

TEST(DiagonalCache, SaveLoadRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "treeshap_hd_cache.bin").string();
  const DiagonalCache c = compute_ms(6, Functional::kShapleyInteraction);
  c.save(path);
  const DiagonalCache back = DiagonalCache::load(path);
  EXPECT_EQ(back.max_k(), 6);
  EXPECT_EQ(back.functional(), Functional::kShapleyInteraction);
  EXPECT_EQ(back.data(), c.data());

  std::ofstream(path, std::ios::binary) << "garbage";
  EXPECT_THROW(DiagonalCache::load(path), ParseError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace treeshap_hd
