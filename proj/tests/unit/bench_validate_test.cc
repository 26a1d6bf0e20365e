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

#include <algorithm>

#include <gtest/gtest.h>

#include "split/bench.h"
#include "split/config.h"
#include "split/validate.h"

namespace split {
namespace {

TEST(Bench, SummarizeOrderStatistics) {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  const TimingStats s = Summarize(v);
  EXPECT_EQ(s.samples, 100);
  EXPECT_NEAR(s.median_ns, 50.5, 1e-12);
  EXPECT_GE(s.p99_ns, 99.0);
  EXPECT_LE(s.p99_ns, 100.0);
}

TEST(Bench, LinearFit) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_NEAR(LinearFitR2(x, {3, 5, 7, 9, 11}), 1.0, 1e-12);
  EXPECT_LT(LinearFitR2(x, {1, 4, 1, 4, 1}), 0.2);
}

TEST(Bench, SmallSweep) {
  BenchOptions o;
  o.sizes = {100, 300};
  o.update_reps = 20;
  o.eval_reps = 20;
  o.iol = false;
  o.full_gp_reps = 1;
  const BenchReport r = RunBench(DefaultScenarioConfig(), o);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].total_samples, 100);
  EXPECT_EQ(r.rows[0].nonempty_cells, 10u);
  EXPECT_EQ(r.rows[1].nonempty_cells, 30u);
  EXPECT_EQ(r.rows[0].split_update.samples, 20);
  EXPECT_EQ(r.rows[0].iol_update.samples, 0);
  EXPECT_GT(r.full_gp_over_bcm, 1.0);
  const std::string csv = BenchCsv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(BenchJson(r).find("split-bench v1"), std::string::npos);
}

TEST(Validate, SuitePassesWithoutClosedLoop) {
  const auto results = RunInvariantSuite(DefaultScenarioConfig(), {.closed_loop = false});
  EXPECT_GE(results.size(), 20u);
  for (const auto& r : results) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
  EXPECT_TRUE(AllPassed(results));
}

TEST(Validate, CorruptionIsCaught) {
  const auto results = RunInvariantSuite(
      DefaultScenarioConfig(), {.inject_cache_corruption = true, .closed_loop = false});
  EXPECT_FALSE(AllPassed(results));
  const auto it = std::find_if(results.begin(), results.end(), [](const auto& r) {
    return r.name == "learner.scratch_equivalence";
  });
  ASSERT_NE(it, results.end());
  EXPECT_FALSE(it->passed);
  EXPECT_NE(InvariantReportJson(results).find("split-validate v1"), std::string::npos);
}

}  // namespace
}  // namespace split
