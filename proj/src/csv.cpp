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

#include "smoothgate/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smoothgate/errors.hpp"

namespace smoothgate {

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw ParameterError("table: row width differs from header");
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  if (!std::isfinite(x)) throw NumericError("csv: non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_csv(const Table& table, const Metadata& metadata) {
  std::ostringstream os;
  for (const auto& [k, v] : metadata) os << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << quote(table.columns[c]);
  os << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ParameterError("csv: table is not rectangular");
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << "\n";
  }
  return os.str();
}

void emit_csv(const Table& table, const std::filesystem::path& path, const Metadata& metadata) {
  const std::string text = render_csv(table, metadata);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("csv: cannot open " + path.string() + " for writing");
  f << text;
  if (!f.flush()) throw IoError("csv: write failed for " + path.string());
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split_record(line);
    if (!header) {
      t.columns = std::move(fields);
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) throw IoError("csv: ragged row");
    std::vector<double> row;
    for (const std::string& f : fields) {
      double v = 0.0;
      const char* b = f.data();
      const char* e = f.data() + f.size();
      while (b < e && *b == ' ') ++b;
      const auto r = std::from_chars(b, e, v);
      if (r.ec != std::errc() || r.ptr != e) throw ParameterError("csv: cannot parse number '" + f + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ParameterError("csv: missing header row");
  return t;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("csv: cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace smoothgate
