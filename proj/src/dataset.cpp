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

#include "treeshap_hd/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <utility>

#include "treeshap_hd/errors.hpp"

namespace treeshap_hd {

Dataset::Dataset(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

Dataset::Dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
                 std::vector<std::string> column_names)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ValidationError("dataset: value count " + std::to_string(values_.size()) +
                          " does not match " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  set_column_names(std::move(column_names));
}

void Dataset::set_column_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != cols_) {
    throw ValidationError("dataset: " + std::to_string(names.size()) + " column names for " +
                          std::to_string(cols_) + " columns");
  }
  column_names_ = std::move(names);
}

Dataset Dataset::slice(std::size_t begin, std::size_t count) const {
  std::vector<double> values(values_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
                             values_.begin() + static_cast<std::ptrdiff_t>((begin + count) * cols_));
  return Dataset(count, cols_, std::move(values), column_names_);
}

void Dataset::require_finite() const {
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (!std::isfinite(at(r, c))) {
        std::string column = column_names_.empty() ? std::to_string(c) : column_names_[c];
        throw NaNInputError("non-finite value at row " + std::to_string(r) + ", column " +
                            column);
      }
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

}  // namespace

Dataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    for (auto field : split_commas(line)) header.emplace_back(field);
    break;
  }
  if (header.empty()) throw ParseError("csv: missing header line");

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw ParseError("csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      std::string_view field = fields[c];
      double v = 0.0;
      if (field.empty()) {
        throw NaNInputError("missing value at row " + std::to_string(rows) + ", column " +
                            header[c]);
      }
      if (field.front() == '+') field.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("csv: cannot parse '" + std::string(fields[c]) + "' at row " +
                         std::to_string(rows) + ", column " + header[c]);
      }
      if (!std::isfinite(v)) {
        throw NaNInputError("non-finite value at row " + std::to_string(rows) + ", column " +
                            header[c]);
      }
      values.push_back(v);
    }
    ++rows;
  }
  const std::size_t cols = header.size();
  return Dataset(rows, cols, std::move(values), std::move(header));
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace treeshap_hd
