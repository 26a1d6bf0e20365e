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

#ifndef SPLIT_SCENARIO_H_
#define SPLIT_SCENARIO_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "split/config.h"
#include "split/gp.h"
#include "split/learner.h"
#include "split/vehicle.h"

namespace split {

struct StepRecord {
  int step = 0;
  int lap = 1;
  double time = 0.0;
  StateVector state = StateVector::Zero();  // measured, before the step
  InputVector input = InputVector::Zero();
  double progress = 0.0;
  double progress_rate = 0.0;
  double lag_error = 0.0;
  double contour_error = 0.0;
  Eigen::Vector3d feature = Eigen::Vector3d::Zero();
  Eigen::Vector3d label = Eigen::Vector3d::Zero();
  Prediction prediction;
  std::string outcome = "none";
  std::int64_t update_ns = 0;
  std::int64_t eval_ns = 0;
  int qp_iterations = 0;
  bool degraded = false;
  std::size_t store_size = 0;
  std::size_t nonempty_cells = 0;
};

struct LapSummary {
  int lap = 1;
  bool completed = false;
  double lap_time = 0.0;  // s, crossing to crossing
  int steps = 0;
  double max_lateral_g = 0.0;
  double lateral_rms = 0.0;  // m
  double mean_speed = 0.0;
  std::size_t training_set_size = 0;  // at the end of the lap
  std::uint64_t update_count = 0;     // store mutations during the lap
  std::size_t nonempty_cells = 0;
};

struct RunLog {
  std::string mode;
  std::string controller;
  std::uint64_t seed = 0;
  double track_length = 0.0;  // m
  std::vector<StepRecord> steps;
  std::vector<LapSummary> laps;
  bool crashed = false;
  std::string crash_reason;
};

struct RunOutput {
  RunLog log;
  std::shared_ptr<DictionaryStore> store;  // split mode
  std::shared_ptr<FlatStore> flat;         // iol mode
};

// Runs config.laps closed-loop laps from a flying start at the track origin.
// The run stops after the first record past the final crossing, so every
// crossing lies between two records. A crash ends the run early with
// log.crashed set.
RunOutput RunScenario(const ScenarioConfig& config);

// Lap summaries recomputed from step records alone; `track_length` sets the
// crossing positions.
std::vector<LapSummary> RecountLaps(const std::vector<StepRecord>& steps,
                                    double track_length, double dt, int laps);

}  // namespace split

#endif  // SPLIT_SCENARIO_H_
