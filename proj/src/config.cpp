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

#include "smoothgate/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smoothgate/errors.hpp"

namespace smoothgate {

namespace {

std::string trim(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("config: " + key + " = '" + raw + "' is not a finite number");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("config: " + key + " = '" + raw + "' is not an integer");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, raw, boost::algorithm::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    std::string t = trim(p);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  c.text_ = text;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto& [name, sec] : c.tree_) {
    if (sec.empty() && !sec.data().empty()) throw ConfigError("config: key '" + name + "' outside any section");
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

bool Config::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

std::string Config::get_string(const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(key);
  if (!v) throw ConfigError("config: missing required key " + key);
  return trim(*v);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const { return parse_double(key, get_string(key)); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  const long long v = parse_integer(key, get_string(key));
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("config: " + key + " out of range");
  }
  return static_cast<int>(v);
}

int Config::get_int(const std::string& key, int fallback) const { return has(key) ? get_int(key) : fallback; }

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const long long v = parse_integer(key, get_string(key));
  if (v < 0) throw ConfigError("config: " + key + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = boost::algorithm::to_lower_copy(get_string(key));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: " + key + " = '" + v + "' is not a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& p : split_list(get_string(key))) out.push_back(parse_double(key, p));
  if (out.empty()) throw ConfigError("config: " + key + " is an empty list");
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const std::string& p : split_list(get_string(key))) out.push_back(static_cast<int>(parse_integer(key, p)));
  if (out.empty()) throw ConfigError("config: " + key + " is an empty list");
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  return split_list(get_string(key));
}

void Config::set(const std::string& key, const std::string& value) { tree_.put(key, value); }

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [sec, body] : tree_)
    for (const auto& [k, v] : body) out.push_back(sec + "." + k);
  return out;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace smoothgate
