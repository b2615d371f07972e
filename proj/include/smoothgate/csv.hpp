// Copyright 2026 The smoothgate Authors
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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace smoothgate {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

// 17 significant digits; parsing the text back gives the same double.
std::string format_double(double x);

// `#`-prefixed metadata lines, a header row, then the data rows. Throws
// NumericError on any non-finite value.
std::string render_csv(const Table& table, const Metadata& metadata);
void emit_csv(const Table& table, const std::filesystem::path& path, const Metadata& metadata);

Table parse_csv(const std::string& text);
Table read_csv(const std::filesystem::path& path);

}  // namespace smoothgate
