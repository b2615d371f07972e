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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smoothgate/config.hpp"

namespace smoothgate {

inline constexpr const char* kVersion = "0.1.0";

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

// Parses and checks every parameter the scenario will use; throws
// ConfigError or ParameterError. No computation is done.
void validate_scenario(const Config& cfg);

// Validates, then computes all outputs in memory.
std::vector<OutputFile> run_scenario(const Config& cfg, const RunOptions& opt, std::ostream& log);

// Writes all files or none: each goes to a temporary name first and is renamed
// once every file has been written.
void write_outputs(const std::vector<OutputFile>& files, const std::filesystem::path& dir);

std::string config_schema();

// 1 configuration / parameter error, 2 numerical failure, 3 I/O error.
int exit_code_for(const std::exception& e);

}  // namespace smoothgate
