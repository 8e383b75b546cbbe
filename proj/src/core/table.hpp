// Copyright 2026 The robustlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace robustlab {

// Column-named result table. Every experiment driver returns one, and the
// CSV writer is the only place that turns numbers into text.
class Table {
 public:
  using Cell = std::variant<std::int64_t, double, std::string>;

  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t column_index(const std::string& name) const;

  const Cell& at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }
  // Numeric view of a cell; integers are widened, text throws.
  double number(std::size_t row, std::size_t col) const;
  double number(std::size_t row, const std::string& col) const {
    return number(row, column_index(col));
  }
  std::vector<double> column_values(const std::string& col) const;

  // Locale-independent CSV: header line then one line per row, '\n' endings.
  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// Shortest text that reads back to the same double (at most 17 significant
// digits, '.' decimal separator, "inf"/"-inf"/"nan" for non-finite values).
std::string format_real(double value);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace robustlab
