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

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "smoothgate/config.hpp"
#include "smoothgate/parallel.hpp"
#include "smoothgate/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"smoothgate: Molmer-Sorensen gate design and benchmarking"};
  app.set_version_flag("--version", std::string(smoothgate::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "run the scenario described by a config file");
  run->add_option("config", config_path, "INI config file")->required();
  run->add_option("-o,--output-dir", output_dir, "directory for output files");
  run->add_option("--seed", seed, "override scenario.seed");
  run->add_option("-j,--threads", threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", quiet, "suppress progress messages");

  CLI::App* validate = app.add_subcommand("validate", "check a config file without running it");
  validate->add_option("config", config_path, "INI config file")->required();

  CLI::App* schema = app.add_subcommand("schema", "print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (schema->parsed()) {
      std::cout << smoothgate::config_schema();
      return 0;
    }
    const smoothgate::Config cfg = smoothgate::Config::load(config_path);
    if (validate->parsed()) {
      smoothgate::validate_scenario(cfg);
      std::cout << config_path << ": ok\n";
      return 0;
    }
    if (threads > 0) smoothgate::set_thread_count(threads);
    smoothgate::RunOptions opt;
    opt.seed = seed;
    opt.quiet = quiet;
    const auto files = smoothgate::run_scenario(cfg, opt, std::cerr);
    smoothgate::write_outputs(files, output_dir);
    if (!quiet) {
      for (const auto& f : files) std::cerr << "wrote " << (std::filesystem::path(output_dir) / f.name).string() << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "smoothgate: error: " << e.what() << "\n";
    return smoothgate::exit_code_for(e);
  }
}
