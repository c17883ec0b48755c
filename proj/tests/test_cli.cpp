// Copyright 2026 The tiltsearch Authors.
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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "tiltsearch/sweep.hpp"

namespace tiltsearch {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tiltsearch");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tiltsearch_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string WriteConfig(const std::string& text) {
    const fs::path p = dir_ / "c.conf";
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

constexpr const char* kSmall =
    "schedule_steps = 16\ntrial_count = 2\nrepetitions = 1\nparticles = [4]\nbase_B = [1, 4]\n";

TEST_F(CliTest, CheckPasses) {
  const Outcome o = Invoke({"check"});
  EXPECT_EQ(o.code, 0) << o.out << o.err;
}

TEST_F(CliTest, UnknownSubcommandPrintsUsage) {
  const Outcome o = Invoke({"frobnicate"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("sweep"), std::string::npos);
}

TEST_F(CliTest, SweepWritesHeaderAndRows) {
  const Outcome o = Invoke({"sweep", "--config", WriteConfig(kSmall), "--out", (dir_ / "o").string()});
  ASSERT_EQ(o.code, 0) << o.err;
  std::ifstream in(dir_ / "o" / "sweep.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "strategy,N,B,trial_seed,rep,psnr_db,final_reward,meas_residual,elapsed_ms");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 * 2 * 2);  // strategies x B x trials
  EXPECT_TRUE(fs::exists(dir_ / "o" / "summary.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "o" / "errors.csv"));
}

TEST_F(CliTest, SeedFlagChangesTrials) {
  const std::string conf = WriteConfig(kSmall);
  ASSERT_EQ(Invoke({"sweep", "--config", conf, "--out", (dir_ / "a").string(), "--no-timing"}).code, 0);
  ASSERT_EQ(Invoke({"sweep", "--config", conf, "--out", (dir_ / "b").string(), "--no-timing", "--seed",
                 "9"}).code,
            0);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_NE(slurp(dir_ / "a" / "sweep.csv"), slurp(dir_ / "b" / "sweep.csv"));
}

TEST_F(CliTest, BadConfigExitsTwoAndNamesField) {
  const Outcome o = Invoke({"sweep", "--config", WriteConfig("sigma_y = -1\n")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("sigma_y"), std::string::npos);
}

TEST_F(CliTest, RunPrintsTrace) {
  const Outcome o = Invoke({"run", "--config", WriteConfig(kSmall), "--trial", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("psnr_db"), std::string::npos);
}

TEST_F(CliTest, DemoRejectsNonlinearSide) {
  const Outcome o = Invoke({"demo", "--config", WriteConfig(kSmall), "--out", (dir_ / "d").string()});
  EXPECT_NE(o.code, 0);
}

}  // namespace
}  // namespace tiltsearch
