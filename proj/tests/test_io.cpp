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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "smoothgate/config.hpp"
#include "smoothgate/csv.hpp"
#include "smoothgate/errors.hpp"
#include "smoothgate/rng.hpp"
#include "smoothgate/scenario.hpp"

namespace smoothgate {
namespace {

namespace fs = std::filesystem;

TEST(Csv, RoundTripIsBitExact) {
  CounterRng rng(1, 1);
  Table t;
  t.columns = {"a", "b,c", "d\"e"};
  for (int i = 0; i < 200; ++i) {
    t.add_row({rng.uniform() * std::pow(10.0, static_cast<int>(rng.below(40)) - 20), -rng.uniform(),
               std::numeric_limits<double>::denorm_min() * i});
  }
  const Table back = parse_csv(render_csv(t, {{"k", "v"}}));
  EXPECT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(back.rows[i][j], t.rows[i][j]);
  }
}

TEST(Csv, EmptyTableAndMetadata) {
  Table t;
  t.columns = {"x", "y"};
  const std::string s = render_csv(t, {{"seed", "4"}});
  EXPECT_EQ(s, "# seed=4\nx,y\n");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Csv, RejectsNonFiniteAndRagged) {
  Table t;
  t.columns = {"x"};
  EXPECT_THROW(t.add_row({1.0, 2.0}), ParameterError);
  t.add_row({std::nan("")});
  EXPECT_THROW(render_csv(t, {}), NumericError);
  EXPECT_THROW(parse_csv("x,y\n1\n"), IoError);
  EXPECT_THROW(read_csv("/nonexistent/file.csv"), IoError);
}

TEST(Config, TypedAccess) {
  const Config c = Config::parse("[a]\nx = 1.5\nn = 3\nlist = 1, 2,3\nflag = true\nname = hi\n");
  EXPECT_DOUBLE_EQ(c.get_double("a.x"), 1.5);
  EXPECT_EQ(c.get_int("a.n"), 3);
  EXPECT_EQ(c.get_ints("a.list", {}), (std::vector<int>{1, 2, 3}));
  EXPECT_TRUE(c.get_bool("a.flag", false));
  EXPECT_EQ(c.get_string("a.name"), "hi");
  EXPECT_EQ(c.get_double("a.missing", 2.0), 2.0);
  EXPECT_THROW(c.get_int("a.x"), ConfigError);
  EXPECT_THROW(c.get_double("a.name"), ConfigError);
  EXPECT_THROW(c.get_string("b.none"), ConfigError);
  EXPECT_THROW(Config::parse("[a\nx=1"), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent.ini"), ConfigError);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Scenario, ValidationFailsFast) {
  EXPECT_THROW(validate_scenario(Config::parse("[scenario]\nname = nope\n")), ConfigError);
  EXPECT_THROW(validate_scenario(Config::parse("[scenario]\nname = trajectory\n[smooth]\nbogus = 1\n")), ConfigError);
  EXPECT_THROW(validate_scenario(Config::parse("[scenario]\nname = trajectory\n[smooth]\ndelta_min_hz = 5000\n")),
               ParameterError);
  EXPECT_NO_THROW(validate_scenario(Config::parse("[scenario]\nname = trajectory\n")));
}

TEST(Scenario, ExitCodes) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), 1);
  EXPECT_EQ(exit_code_for(ParameterError("x")), 1);
  EXPECT_EQ(exit_code_for(TruncationError("x")), 2);
  EXPECT_EQ(exit_code_for(IoError("x")), 3);
}

std::string strip_timestamp(const std::string& s) {
  std::istringstream in(s);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("# generated=", 0) != 0) out += line + "\n";
  }
  return out;
}

TEST(Scenario, DeterministicOutputs) {
  const Config c = Config::parse(
      "[scenario]\nname = slerb\nseed = 9\n[slerb]\nlengths = 1,10,50,100\nsequences = 5\nshots = 20\nresamples = 100\n");
  std::ostringstream log;
  const auto a = run_scenario(c, {}, log), b = run_scenario(c, {}, log);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].name, "slerb_fit.txt");
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(strip_timestamp(a[i].content), strip_timestamp(b[i].content));
  EXPECT_NE(a[0].content.find("# seed=9"), std::string::npos);
  EXPECT_NE(a[0].content.find("# config_hash=fnv1a64:"), std::string::npos);
  EXPECT_NE(a[0].content.find("# tool=smoothgate"), std::string::npos);
  RunOptions o;
  o.seed = 10;
  const auto d = run_scenario(c, o, log);
  EXPECT_NE(strip_timestamp(a[0].content), strip_timestamp(d[0].content));
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(SMOOTHGATE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("smoothgate_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  fs::path dir_;
};

TEST_F(CliTest, MalformedConfigExitsOneWithoutOutputs) {
  const fs::path cfg = write("bad.ini", "[scenario]\nname = trajectory\ntypo_key = 1\n");
  const fs::path out = dir_ / "out";
  EXPECT_EQ(run_cli("run " + cfg.string() + " --output-dir " + out.string()), 1);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run_cli("validate " + cfg.string()), 1);
  EXPECT_EQ(run_cli("run " + (dir_ / "missing.ini").string()), 1);
}

TEST_F(CliTest, RunsAndWritesHeaderedCsv) {
  const fs::path cfg = write("t.ini", "[scenario]\nname = trajectory\noutput = traj.csv\n[trajectory]\ngate = walsh\n");
  EXPECT_EQ(run_cli("validate " + cfg.string()), 0);
  EXPECT_EQ(run_cli("run " + cfg.string() + " -q --threads 1 --seed 5 --output-dir " + dir_.string()), 0);
  std::ifstream in(dir_ / "traj.csv");
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("# tool=smoothgate", 0), 0u);
  const Table t = read_csv(dir_ / "traj.csv");
  EXPECT_GT(t.rows.size(), 10u);
  EXPECT_EQ(run_cli("schema"), 0);
}

TEST_F(CliTest, UnwritableOutputExitsThree) {
  const fs::path cfg = write("t.ini", "[scenario]\nname = trajectory\n");
  write("blocker", "x");
  EXPECT_EQ(run_cli("run " + cfg.string() + " -q --output-dir " + (dir_ / "blocker" / "sub").string()), 3);
}

TEST_F(CliTest, NumericFailureExitsTwo) {
  const fs::path cfg = write("n.ini",
                             "[scenario]\nname = thermal-sweep\n[sweep]\nnbar = 0\noffset_hz = 0\n[numerics]\nn_max = 1\n"
                             "[walsh]\norder = 1\n");
  EXPECT_EQ(run_cli("run " + cfg.string() + " -q --output-dir " + dir_.string()), 2);
}

}  // namespace
}  // namespace smoothgate
