// Copyright 2026 The SPLIT Authors
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

#include "split/scenario.h"

#include <sstream>

#include <gtest/gtest.h>

#include "lap_oracle.h"
#include "split/config.h"
#include "split/run_log.h"

namespace split {
namespace {

ScenarioConfig OneLap(Mode mode) {
  ScenarioConfig c =
      LoadScenarioConfig(std::string(SPLIT_SOURCE_DIR) + "/configs/default.json");
  c.mode = mode;
  c.laps = 1;
  c.controller.kind = ControllerKind::kMpc;
  return c;
}

class ScenarioTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    split_ = new RunOutput(RunScenario(OneLap(Mode::kSplit)));
  }
  static void TearDownTestSuite() { delete split_; }
  static RunOutput* split_;
};

RunOutput* ScenarioTest::split_ = nullptr;

TEST_F(ScenarioTest, CompletesOneLap) {
  const RunLog& log = split_->log;
  EXPECT_FALSE(log.crashed) << log.crash_reason;
  ASSERT_EQ(log.laps.size(), 1u);
  EXPECT_TRUE(log.laps[0].completed);
  EXPECT_GT(log.track_length, 0.0);
}

TEST_F(ScenarioTest, OneRecordPerStep) {
  const RunLog& log = split_->log;
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    EXPECT_EQ(log.steps[i].step, static_cast<int>(i));
    EXPECT_NEAR(log.steps[i].time, 0.05 * i, 1e-9);
  }
}

TEST_F(ScenarioTest, LapTimeMatchesCrossingOracle) {
  const RunLog& log = split_->log;
  std::vector<double> t, p;
  for (const auto& r : log.steps) {
    t.push_back(r.time);
    p.push_back(r.progress);
  }
  const std::vector<double> crossings = oracle::CrossingTimes(t, p, log.track_length);
  ASSERT_EQ(crossings.size(), 1u);
  EXPECT_NEAR(log.laps[0].lap_time, crossings[0], 1e-9);
  const auto recount = RecountLaps(log.steps, log.track_length, 0.05, 1);
  EXPECT_EQ(recount[0].lap_time, log.laps[0].lap_time);
  EXPECT_EQ(recount[0].lateral_rms, log.laps[0].lateral_rms);
}

TEST_F(ScenarioTest, StoreCountsMatchRecords) {
  const RunLog& log = split_->log;
  std::size_t added = 0;
  for (const auto& r : log.steps) added += r.outcome == "added";
  EXPECT_EQ(split_->store->total_samples(), added);
  EXPECT_EQ(log.steps.back().store_size, added);
  std::set<CellIndex> cells;
  for (const auto& [cell, dict] : split_->store->Snapshot()) {
    for (const auto& s : dict->samples()) cells.insert(CellOf(s.z, split_->store->region()));
  }
  EXPECT_EQ(split_->store->nonempty_cells(), cells.size());
}

TEST_F(ScenarioTest, DeterministicLog) {
  const RunOutput again = RunScenario(OneLap(Mode::kSplit));
  std::stringstream a, b;
  WriteStepCsv(a, split_->log.steps);
  WriteStepCsv(b, again.log.steps);
  EXPECT_EQ(a.str(), b.str());
  std::stringstream sa, sb;
  WriteStore(sa, split_->store->Snapshot());
  WriteStore(sb, again.store->Snapshot());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Scenario, NominalModeLearnsNothing) {
  const RunOutput out = RunScenario(OneLap(Mode::kNominal));
  EXPECT_EQ(out.store, nullptr);
  for (const auto& r : out.log.steps) {
    EXPECT_EQ(r.outcome, "none");
    EXPECT_TRUE(r.prediction.mean.isZero(0.0));
  }
}

TEST(Scenario, RecountHandlesPartialLap) {
  std::vector<StepRecord> steps(5);
  for (int i = 0; i < 5; ++i) {
    steps[i].time = 0.05 * i;
    steps[i].progress = 10.0 * i;
  }
  const auto laps = RecountLaps(steps, 25.0, 0.05, 2);
  ASSERT_EQ(laps.size(), 2u);
  EXPECT_TRUE(laps[0].completed);
  EXPECT_NEAR(laps[0].lap_time, 0.125, 1e-12);
  EXPECT_FALSE(laps[1].completed);
}

}  // namespace
}  // namespace split
