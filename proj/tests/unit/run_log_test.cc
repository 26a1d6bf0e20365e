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

#include "split/run_log.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "split/config.h"
#include "split/errors.h"

namespace split {
namespace {

StepRecord RandomRecord(std::mt19937_64& rng, int step) {
  std::normal_distribution<double> n(0, 1);
  StepRecord r;
  r.step = step;
  r.lap = 1 + step / 10;
  r.time = 0.05 * step;
  for (int i = 0; i < 8; ++i) r.state[i] = n(rng);
  r.input = {n(rng), n(rng)};
  r.progress = 0.3 * step;
  r.progress_rate = n(rng);
  r.lag_error = n(rng);
  r.contour_error = n(rng);
  r.feature = {n(rng), n(rng), n(rng)};
  r.label = {n(rng), n(rng), n(rng)};
  r.prediction.mean = {n(rng), n(rng), n(rng)};
  r.prediction.variance = {1e-3, 2e-3, 3e-3};
  r.outcome = step % 3 ? "added" : "rejected-low-gain";
  r.update_ns = 1234;
  r.qp_iterations = step;
  r.degraded = step % 7 == 0;
  r.store_size = step;
  r.nonempty_cells = step / 2;
  return r;
}

TEST(RunLog, StepCsvRoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::vector<StepRecord> steps;
  for (int i = 0; i < 30; ++i) steps.push_back(RandomRecord(rng, i));
  std::stringstream ss;
  WriteStepCsv(ss, steps);
  const std::vector<StepRecord> back = ReadStepCsv(ss);
  ASSERT_EQ(back.size(), steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    EXPECT_EQ(back[i].state, steps[i].state);
    EXPECT_EQ(back[i].input, steps[i].input);
    EXPECT_EQ(back[i].feature, steps[i].feature);
    EXPECT_EQ(back[i].label, steps[i].label);
    EXPECT_EQ(back[i].prediction.mean, steps[i].prediction.mean);
    EXPECT_EQ(back[i].outcome, steps[i].outcome);
    EXPECT_EQ(back[i].degraded, steps[i].degraded);
    EXPECT_EQ(back[i].store_size, steps[i].store_size);
  }
  std::stringstream again;
  WriteStepCsv(again, back);
  std::stringstream first;
  WriteStepCsv(first, steps);
  EXPECT_EQ(again.str(), first.str());
}

TEST(RunLog, SchemaErrors) {
  std::stringstream bad_header("step,lap\n0,1\n");
  EXPECT_THROW(ReadStepCsv(bad_header), SchemaError);
  std::stringstream short_row(StepCsvHeader() + "\n0,1,0\n");
  EXPECT_THROW(ReadStepCsv(short_row), SchemaError);
  std::stringstream not_number(StepCsvHeader() + "\n" +
                               std::string("x") + std::string(300, ',') + "\n");
  EXPECT_THROW(ReadStepCsv(not_number), SchemaError);
}

TEST(RunLog, StoreRoundTripsExactly) {
  const ScenarioConfig c = DefaultScenarioConfig();
  DictionaryStore store(c.hyperparameters, c.region, c.learner, c.vehicle, c.tires);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-0.1, 0.1), y(-0.1, 0.1);
  for (int i = 0; i < 500; ++i) {
    store.TryInsert({Feature(a(rng), a(rng), 5 * a(rng)), {y(rng), y(rng), y(rng)}},
                    10.0);
  }
  std::stringstream ss;
  WriteStore(ss, store.Snapshot());
  DictionaryStore back(c.hyperparameters, c.region, c.learner, c.vehicle, c.tires);
  ReadStore(ss, &back);
  EXPECT_EQ(back.total_samples(), store.total_samples());
  const StoreSnapshot s1 = store.Snapshot(), s2 = back.Snapshot();
  ASSERT_EQ(s1.size(), s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    EXPECT_EQ(s1[i].first, s2[i].first);
    ASSERT_EQ(s1[i].second->size(), s2[i].second->size());
    for (int j = 0; j < s1[i].second->size(); ++j) {
      EXPECT_EQ(s1[i].second->samples()[j].z, s2[i].second->samples()[j].z);
      EXPECT_EQ(s1[i].second->samples()[j].y, s2[i].second->samples()[j].y);
    }
  }
  std::stringstream again;
  WriteStore(again, s2);
  std::stringstream first;
  WriteStore(first, s1);
  EXPECT_EQ(again.str(), first.str());
}

TEST(RunLog, StoreSchemaErrors) {
  const ScenarioConfig c = DefaultScenarioConfig();
  DictionaryStore store(c.hyperparameters, c.region, c.learner, c.vehicle, c.tires);
  std::stringstream wrong("not a store\n");
  EXPECT_THROW(ReadStore(wrong, &store), SchemaError);
  // Sample outside its declared cell.
  std::stringstream misplaced(StoreHeader() + "\n0 0 0 0.5 0 0 0 0 0\n");
  EXPECT_THROW(ReadStore(misplaced, &store), SchemaError);
}

}  // namespace
}  // namespace split
