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

#include <cmath>
#include <string>

#include "gtest/gtest.h"
#include "treeshap_hd/errors.hpp"
#include "treeshap_hd/tree_model.hpp"

namespace treeshap_hd {
namespace {

const std::string kDataDir = TREESHAP_HD_TEST_DATA_DIR;

// Splits a prediction fixture into the feature columns and the expected
// prediction in the last column.
std::pair<Dataset, std::vector<double>> load_fixture(const std::string& name) {
  const Dataset all = read_csv(kDataDir + "/" + name);
  const std::size_t cols = all.cols() - 1;
  Dataset x(all.rows(), cols);
  std::vector<double> y(all.rows());
  for (std::size_t r = 0; r < all.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) x.at(r, c) = all.at(r, c);
    y[r] = all.at(r, cols);
  }
  return {x, y};
}

TEST(LightGbmImport, Stump) {
  const EnsembleModel m = load_lightgbm_text(kDataDir + "/lgbm_stump.txt");
  EXPECT_EQ(m.n_features(), 2);
  EXPECT_EQ(m.feature_names(), (std::vector<std::string>{"Column_0", "Column_1"}));
  for (const auto& t : m.trees()) EXPECT_TRUE(t.has_covers());
  const auto [x, y] = load_fixture("lgbm_stump_predictions.csv");
  const auto p = predict(m, x);
  for (std::size_t r = 0; r < y.size(); ++r) EXPECT_NEAR(p[r], y[r], 1e-9);
}

TEST(LightGbmImport, EnsembleMatchesReferencePredictions) {
  const EnsembleModel m = load_lightgbm_text(kDataDir + "/lgbm_ensemble.txt");
  EXPECT_EQ(m.trees().size(), 12u);
  EXPECT_EQ(m.n_features(), 5);
  const auto [x, y] = load_fixture("lgbm_ensemble_predictions.csv");
  ASSERT_EQ(x.rows(), 128u);
  const auto p = predict(m, x);
  for (std::size_t r = 0; r < y.size(); ++r) EXPECT_NEAR(p[r], y[r], 1e-9) << "row " << r;
}

TEST(LightGbmImport, Rejections) {
  EXPECT_THROW(load_lightgbm_text(kDataDir + "/lgbm_categorical.txt"), UnsupportedFeatureError);
  EXPECT_THROW(parse_lightgbm_text(""), ParseError);
  EXPECT_THROW(load_lightgbm_text(kDataDir + "/does_not_exist.txt"), ParseError);
}

}  // namespace
}  // namespace treeshap_hd
