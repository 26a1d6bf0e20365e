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

#ifndef SPLIT_REPLAY_H_
#define SPLIT_REPLAY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "split/config.h"
#include "split/learner.h"
#include "split/scenario.h"

namespace split {

struct ReplayOptions {
  int train_lap = 1;
  // Empty: every lap after train_lap.
  std::vector<int> eval_laps;
  bool ablation = true;
  int ablation_budget = 100;  // samples in each ablation model
};

struct AccuracyReport {
  std::size_t train_records = 0;
  std::size_t eval_records = 0;
  // Per velocity state (v_x, v_y, r).
  Eigen::Vector3d nominal_rmse = Eigen::Vector3d::Zero();
  Eigen::Vector3d hybrid_rmse = Eigen::Vector3d::Zero();
  // RMS of the norm of the velocity-error vector.
  double nominal_norm_rmse = 0.0;
  double hybrid_norm_rmse = 0.0;
  std::size_t store_samples = 0;
  std::size_t nonempty_cells = 0;
};

struct AblationReport {
  int budget = 0;
  // Slip/torque features (alpha_f, alpha_r, T / T_max).
  Eigen::Vector3d slip_torque_rmse = Eigen::Vector3d::Zero();
  // State features (v_x, v_y, r, T / T_max, delta).
  Eigen::Vector3d state_rmse = Eigen::Vector3d::Zero();
  int slip_torque_size = 0;
  int state_size = 0;
};

struct ReplayReport {
  AccuracyReport accuracy;
  std::optional<AblationReport> ablation;
};

// Streams the training lap's (z, y) pairs through a fresh partitioned store
// (returned through `store` when given) and scores one-step velocity
// predictions on the evaluation laps, nominal (g = 0) against hybrid.
// Throws SchemaError when either lap has no usable records.
ReplayReport Replay(const std::vector<StepRecord>& steps,
                    const ScenarioConfig& config, const ReplayOptions& options,
                    DictionaryStore* store = nullptr);

std::string ReplayReportJson(const ReplayReport& report);

}  // namespace split

#endif  // SPLIT_REPLAY_H_
