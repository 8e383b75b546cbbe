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

#include "core/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "core/errors.hpp"

namespace robustlab {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw ContractError("table row has " + std::to_string(row.size()) + " cells, expected " +
                        std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw ContractError("no column named '" + name + "'");
}

double Table::number(std::size_t row, std::size_t col) const {
  const Cell& c = at(row, col);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  throw ContractError("cell (" + std::to_string(row) + ", " + columns_[col] + ") is text");
}

std::vector<double> Table::column_values(const std::string& col) const {
  const std::size_t c = column_index(col);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) out.push_back(number(r, c));
  return out;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out += ',';
    out += columns_[c];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
              out += std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
              out += format_real(v);
            } else {
              out += v;
            }
          },
          row[c]);
    }
    out += '\n';
  }
  return out;
}

void Table::write_csv(const std::string& path) const { write_text_file(path, to_csv()); }

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace robustlab
