// Copyright 2026 The RCO Authors
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

// Drives the rco_cli binary as a subprocess.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string kCli = RCO_CLI_PATH;
const std::string kSrc = RCO_SOURCE_DIR;

int run(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rco_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string scenario(const std::string& name) const { return kSrc + "/scenarios/" + name + ".json"; }

  fs::path dir_;
};

TEST_F(CliTest, RunWritesResults) {
  ASSERT_EQ(run("run --mode baseline --scenarios " + scenario("ped_hazard") + " --out " + dir_.string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "summary.json"));
  const std::string episode = slurp(dir_ / "episodes" / "ped_hazard.json");
  EXPECT_NE(episode.find("collision_pedestrian"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "logs" / "ped_hazard.jsonl"));
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const std::string common = "run --mode rco --jobs 3 --scenarios " + kSrc + "/scenarios --out ";
  ASSERT_EQ(run(common + (dir_ / "a").string()), 0);
  ASSERT_EQ(run(common + (dir_ / "b").string()), 0);
  const std::string a = slurp(dir_ / "a" / "summary.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "summary.csv"));
}

TEST_F(CliTest, ReplayRendersTrace) {
  ASSERT_EQ(run("run --mode rco --scenarios " + scenario("ped_hazard") + " --out " + dir_.string()), 0);
  const std::string log = (dir_ / "logs" / "ped_hazard.jsonl").string();
  const std::string trace = (dir_ / "trace.txt").string();
  const int status = std::system(("\"" + kCli + "\" replay " + log + " > " + trace).c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_NE(slurp(trace).find("verified_pair"), std::string::npos);
}

TEST_F(CliTest, SweepWritesTable) {
  ASSERT_EQ(run("sweep --limits 1,5 --scenarios " + scenario("tl_benign") + " --out " + dir_.string()), 0);
  const std::string csv = slurp(dir_ / "sweep.csv");
  EXPECT_EQ(csv.rfind("n_max,", 0), 0u);
}

TEST_F(CliTest, ConfigFileAndOverrides) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"mode": "always_stop", "scenarios": [")" << scenario("tl_benign") << R"("], "n_max": 4})";
  ASSERT_EQ(run("run --config " + cfg.string() + " --out " + dir_.string()), 0);
  EXPECT_NE(slurp(dir_ / "summary.csv").find("always_stop"), std::string::npos);
  // A flag beats the file.
  ASSERT_EQ(run("run --config " + cfg.string() + " --mode baseline --out " + dir_.string()), 0);
  EXPECT_NE(slurp(dir_ / "summary.csv").find("baseline"), std::string::npos);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run("run --bogus-flag"), 2);
  EXPECT_EQ(run("run --mode rco --n-max 0 --scenarios " + scenario("tl_benign") + " --out " + dir_.string()), 2);
  EXPECT_EQ(run("run --mode teleport --scenarios " + scenario("tl_benign")), 2);
  EXPECT_EQ(run("run --mode rco --scenarios /nonexistent"), 2);
  EXPECT_EQ(run("run --mode rco --table /nonexistent.json --scenarios " + scenario("tl_benign")), 2);
  const fs::path cfg = dir_ / "bad.json";
  std::ofstream(cfg) << R"({"scenarios": [")" << scenario("tl_benign") << R"("], "no_such_key": 1})";
  EXPECT_EQ(run("run --config " + cfg.string()), 2);
  EXPECT_EQ(run("replay /nonexistent.jsonl"), 2);
  EXPECT_EQ(run(""), 2);
}

}  // namespace
