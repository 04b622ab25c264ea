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

#ifndef TREESHAP_HD_DATASET_HPP_
#define TREESHAP_HD_DATASET_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace treeshap_hd {

// Dense row-major table of finite reals. Column order is feature order.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::size_t cols);
  Dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
          std::vector<std::string> column_names = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  void set_column_names(std::vector<std::string> names);

  // Returns rows [begin, begin + count) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t count) const;

  // Throws NaNInputError naming the first non-finite cell.
  void require_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::string> column_names_;
};

// Reads a CSV file with a header line. Every cell must parse as a finite real;
// NaN cells raise NaNInputError with the row and column in the message.
Dataset read_csv(const std::string& path);
Dataset parse_csv(const std::string& text);

}  // namespace treeshap_hd

#endif  // TREESHAP_HD_DATASET_HPP_
