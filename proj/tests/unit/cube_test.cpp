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

#include "treeshap_hd/cube.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "game_oracles.hpp"
#include "gtest/gtest.h"
#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {
namespace {

Cube cube(PositionSet pos, PositionSet neg, double w = 1.0) { return Cube{pos, neg, w}; }

TEST(Cube, SpecTableForTwoFeatures) {
  // Position 0 (age) is bit 1, position 1 (sugar) is bit 0.
  const MCubesMatrix m = map_patterns_to_cube(2);
  EXPECT_EQ(m.size(), 9u);
  const Cube* c = m.find(0b10, 0b01);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->positive, 0b01u);
  EXPECT_EQ(c->negative, 0b10u);
  const Cube* full = m.find(0b11, 0b11);
  ASSERT_NE(full, nullptr);
  EXPECT_TRUE(full->empty());
  EXPECT_EQ(m.find(0b00, 0b00), nullptr);
}

TEST(Cube, MatrixSizes) {
  const MCubesMatrix one = map_patterns_to_cube(1);
  ASSERT_EQ(one.size(), 3u);
  EXPECT_EQ(one.find(1, 0)->positive, 1u);
  EXPECT_EQ(one.find(0, 1)->negative, 1u);
  EXPECT_TRUE(one.find(1, 1)->empty());

  const MCubesMatrix three = map_patterns_to_cube(3);
  EXPECT_EQ(three.size(), 27u);
  ASSERT_NE(three.find(7, 7), nullptr);
  EXPECT_TRUE(three.find(7, 7)->empty());
  EXPECT_THROW(map_patterns_to_cube(kMaxCubeMatrixK + 1), DepthCapError);
}

TEST(Cube, DiagonalMatchesAntiDiagonal) {
  const auto d1 = cubes_in_diagonal(1);
  EXPECT_EQ(d1[1].positive, 1u);
  EXPECT_EQ(d1[0].negative, 1u);
  const auto d2 = cubes_in_diagonal(2);
  EXPECT_EQ(d2[0b10].positive, 0b01u);
  EXPECT_EQ(d2[0b10].negative, 0b10u);
  for (int k = 1; k <= 8; ++k) {
    const MCubesMatrix m = map_patterns_to_cube(k);
    const auto diag = cubes_in_diagonal(k);
    const std::uint32_t all = (1u << k) - 1u;
    for (std::uint32_t a = 0; a <= all; ++a) {
      const Cube* c = m.find(a, all - a);
      ASSERT_NE(c, nullptr);
      EXPECT_EQ(c->positive, diag[a].positive);
      EXPECT_EQ(c->negative, diag[a].negative);
      EXPECT_EQ(std::popcount(c->positive | c->negative), k);
    }
  }
}

TEST(Cube, ClosedFormExamples) {
  EXPECT_EQ(shapley_of_cube(cube(1, 0), 0), 1.0);
  EXPECT_EQ(shapley_of_cube(cube(1, 2), 0), 0.5);
  EXPECT_EQ(shapley_of_cube(cube(1, 2), 1), -0.5);
  EXPECT_NEAR(shapley_of_cube(cube(3, 4), 0), 1.0 / 6, 1e-15);
  EXPECT_NEAR(shapley_of_cube(cube(3, 4), 1), 1.0 / 6, 1e-15);
  EXPECT_NEAR(shapley_of_cube(cube(3, 4), 2), -1.0 / 3, 1e-15);
  EXPECT_EQ(shapley_of_cube(cube(0, 0), 0), 0.0);

  EXPECT_EQ(banzhaf_of_cube(cube(1, 0), 0), 1.0);
  EXPECT_EQ(banzhaf_of_cube(cube(1, 2), 0), 0.5);
  EXPECT_EQ(banzhaf_of_cube(cube(1, 2), 1), -0.5);
  EXPECT_EQ(banzhaf_of_cube(cube(0, 0), 3), 0.0);

  EXPECT_EQ(shapley_interaction_of_cube(cube(3, 0), 0, 1), 1.0);
  EXPECT_EQ(shapley_interaction_of_cube(cube(1, 0), 0, 1), 0.0);
  EXPECT_EQ(shapley_interaction_of_cube(cube(1, 2), 0, 1), -1.0);
  EXPECT_THROW(shapley_interaction_of_cube(cube(3, 0), 1, 1), InvalidPairError);
}

TEST(Cube, InverseBinomial) {
  EXPECT_EQ(inverse_binomial(4, 2), 1.0 / 6);
  EXPECT_EQ(inverse_binomial(30, 0), 1.0);
  EXPECT_DOUBLE_EQ(inverse_binomial(60, 30), 1.0 / 118264581564861424.0);
}

// Every (positive, negative) split of n players against the game oracles.
TEST(Cube, ClosedFormsMatchDefinitions) {
  for (int n = 1; n <= 7; ++n) {
    const std::uint32_t all = (1u << n) - 1u;
    for (std::uint32_t pos = 0; pos <= all; ++pos) {
      const std::uint32_t neg = all & ~pos;
      const double w = 1.0 + 0.25 * pos;
      const auto v = testing::cube_game(n, pos, neg, w);
      const Cube c = cube(pos, neg, w);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(shapley_of_cube(c, i), testing::shapley(v, n, i), 1e-12);
        EXPECT_NEAR(banzhaf_of_cube(c, i), testing::banzhaf(v, n, i), 1e-12);
        if (n <= 5) {
          EXPECT_NEAR(shapley_of_cube(c, i), testing::shapley_by_permutations(v, n, i), 1e-12);
        }
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          EXPECT_NEAR(shapley_interaction_of_cube(c, i, j), testing::interaction(v, n, i, j),
                      1e-12)
              << "n=" << n << " pos=" << pos << " i=" << i << " j=" << j;
        }
      }
    }
  }
}

TEST(Cube, EfficiencyAndLinearity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const std::uint32_t all = (1u << n) - 1u;
    const std::uint32_t pos = static_cast<std::uint32_t>(rng()) & all;
    const Cube c = cube(pos, all & ~pos, 2.5);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += shapley_of_cube(c, i);
      Cube scaled = c;
      scaled.weight = -3.0 * c.weight;
      EXPECT_NEAR(shapley_of_cube(scaled, i), -3.0 * shapley_of_cube(c, i), 1e-12);
    }
    EXPECT_NEAR(sum, c.evaluate(all) - c.evaluate(0), 1e-12);
    EXPECT_EQ(shapley_of_cube(c, n), 0.0);  // dummy position
  }
}

TEST(Cube, DensifyRejectsLargeK) {
  const MCubesMatrix m = map_patterns_to_cube(13);
  EXPECT_THROW(m.densify(Functional::kShapley, 0), SizeError);
}

}  // namespace
}  // namespace treeshap_hd
