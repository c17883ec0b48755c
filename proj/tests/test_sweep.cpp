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

#include <gtest/gtest.h>

#include "tiltsearch/sweep.hpp"

namespace tiltsearch {
namespace {

ExperimentConfig Small() {
  ExperimentConfig c;
  c.schedule_steps = 16;
  c.beta_max = 0.3;
  c.trial_count = 3;
  c.repetitions = 2;
  c.particles = {4};
  c.bases = {1, 2, 4};
  c.mlp_hidden = {8};
  return c;
}

std::vector<std::string> Column(const std::string& csv, int column) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string f;
    for (int i = 0; i <= column; ++i) std::getline(fields, f, ',');
    out.push_back(f);
  }
  return out;
}

TEST(Sweep, HeaderIsStable) {
  const std::string csv = FormatSweepCsv(RunSweep(Small(), {.record_timing = false}));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "strategy,N,B,trial_seed,rep,psnr_db,final_reward,meas_residual,elapsed_ms");
}

TEST(Sweep, RowsCoverTheGridInOrder) {
  const ExperimentConfig c = Small();
  const auto rows = RunSweep(c, {.record_timing = false});
  ASSERT_EQ(rows.size(), 3u * 2 * 3 * 2);
  EXPECT_EQ(rows[0].strategy, Strategy::kRecursiveForkJoin);
  EXPECT_EQ(rows[0].base, 1);
  EXPECT_EQ(rows[1].rep, 1);
  EXPECT_EQ(rows[2].base, 2);
  EXPECT_EQ(rows[6].strategy, Strategy::kGreedySearch);
  EXPECT_EQ(rows[12].trial_seed, TrialSeed(c.master_seed, 1));
  for (const auto& r : rows) {
    EXPECT_FALSE(r.error.has_value());
    EXPECT_TRUE(std::isfinite(r.psnr));
    EXPECT_EQ(r.elapsed_ms, 0.0);
  }
}

TEST(Sweep, RepeatedRunsAreBitwiseIdentical) {
  const ExperimentConfig c = Small();
  EXPECT_EQ(FormatSweepCsv(RunSweep(c, {.record_timing = false})),
            FormatSweepCsv(RunSweep(c, {.record_timing = false})));
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
  const ExperimentConfig c = Small();
  const std::string one = FormatSweepCsv(RunSweep(c, {.workers = 1, .record_timing = false}));
  for (int w : {2, 3, 8}) {
    EXPECT_EQ(FormatSweepCsv(RunSweep(c, {.workers = w, .record_timing = false})), one);
  }
}

TEST(Sweep, SeedChangesResults) {
  ExperimentConfig c = Small();
  const std::string a = FormatSweepCsv(RunSweep(c, {.record_timing = false}));
  c.master_seed = 99;
  EXPECT_NE(FormatSweepCsv(RunSweep(c, {.record_timing = false})), a);
}

TEST(Sweep, BestOfNMatchesGreedySearchWithLargeBase) {
  ExperimentConfig c = Small();
  c.strategies = {Strategy::kBestOfN};
  c.bases = {1};
  const std::string bon = FormatSweepCsv(RunSweep(c, {.record_timing = false}));
  c.strategies = {Strategy::kGreedySearch};
  c.bases = {2 * c.schedule_steps};
  const std::string gs = FormatSweepCsv(RunSweep(c, {.record_timing = false}));
  for (int col : {3, 4, 5, 6, 7}) EXPECT_EQ(Column(bon, col), Column(gs, col)) << "column " << col;
}

TEST(Sweep, GenerationFailuresBecomeErrorRows) {
  ExperimentConfig c = Small();
  c.side_kind = SideKind::kLinear;
  c.reward_kind = RewardKind::kNegQuadratic;
  c.meas_dim = 2;  // A spans the plane, so no orthogonal side operator exists
  const auto rows = RunSweep(c, {.record_timing = false});
  ASSERT_EQ(rows.size(), 36u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.error.has_value());
    EXPECT_TRUE(std::isnan(r.psnr));
  }
  EXPECT_NE(FormatSweepCsv(rows).find(",nan,nan,nan,"), std::string::npos);
}

TEST(Sweep, RejectsBadWorkerCount) {
  EXPECT_THROW(RunSweep(Small(), {.workers = 0}), std::invalid_argument);
}

TEST(Sweep, SearchSeedIgnoresStrategyAndBase) {
  EXPECT_EQ(SearchSeed(5, 8, 2), SearchSeed(5, 8, 2));
  EXPECT_NE(SearchSeed(5, 8, 2), SearchSeed(5, 8, 3));
  EXPECT_NE(SearchSeed(5, 8, 2), SearchSeed(5, 4, 2));
  EXPECT_NE(TrialSeed(0, 1), TrialSeed(1, 0));
}

TEST(WriteFileAtomic, CreatesDirectoriesAndLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "tiltsearch_atomic_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "out.csv";
  WriteFileAtomic(path, "a,b\n1,2\n");
  WriteFileAtomic(path, "a,b\n3,4\n");
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), "a,b\n3,4\n");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace tiltsearch
