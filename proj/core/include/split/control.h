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

#ifndef SPLIT_CONTROL_H_
#define SPLIT_CONTROL_H_

#include <vector>

#include <Eigen/Core>

#include "split/qp.h"
#include "split/region.h"
#include "split/residual.h"
#include "split/track.h"
#include "split/vehicle.h"

namespace split {

using StateWeights = Eigen::Matrix<double, 8, 1>;

struct SolverStats {
  int sqp_iterations = 0;
  int qp_iterations = 0;  // summed over SQP iterations
  QpStatus status = QpStatus::kSolved;
  double kkt_residual = 0.0;
  // The QP failed and the returned input comes from the previous plan.
  bool degraded = false;
};

// Reference tracking on the hybrid model.
struct MpcConfig {
  int horizon = 30;
  double dt = 0.05;
  StateWeights q = (StateWeights() << 0, 0, 10, 1, 1, 1, 0, 0).finished();
  Eigen::Vector2d r{1e-7, 1.0};
  StateWeights p = (StateWeights() << 0, 0, 10, 1, 1, 1, 0, 0).finished();
  // Weight on the offset along the reference's lateral normal, when the
  // reference carries normals.
  double q_lateral = 10.0;
  int sqp_iterations = 1;
  QpSettings qp{.tolerance = 1e-8};

  void Validate() const;
};

struct MpcReference {
  std::vector<StateVector> states;  // horizon + 1
  std::vector<InputVector> inputs;  // horizon
  // Optional unit normals (per state) for the lateral-offset term.
  std::vector<Eigen::Vector2d> normals;
};

struct MpcResult {
  InputVector input = InputVector::Zero();
  std::vector<StateVector> trajectory;
  std::vector<InputVector> inputs;
  SolverStats stats;
};

// Centerline reference starting at arc length `theta` and advancing at
// `speed`: pose from the centerline, heading unwrapped next to the current
// yaw, v_x = speed, v_y = 0, r = speed * curvature.
MpcReference TrackReference(const Track& track, double theta, double yaw,
                            double speed, const MpcConfig& config);

class MpcController {
 public:
  MpcController(MpcConfig config, VehicleParams vehicle, TireParams tires);

  // Linearizes about the previous plan shifted by one stage (zero inputs on
  // a cold start), with g evaluated along it and held fixed in each QP.
  MpcResult Step(const StateVector& state, const MpcReference& reference,
                 const ResidualModel& model);
  void Reset() { plan_.clear(); }

  const MpcConfig& config() const { return config_; }

 private:
  MpcConfig config_;
  VehicleParams vehicle_;
  TireParams tires_;
  std::vector<InputVector> plan_;
};

// Progress-maximizing contouring control.
struct MpccConfig {
  int horizon = 30;
  double dt = 0.05;
  double q_lag = 100.0;
  double q_contour = 50.0;
  double q_progress = 0.5;
  Eigen::Vector2d r_input{1e-7, 1.0};  // on (dT/dt, d delta/dt)
  double r_progress_change = 0.1;     // on v_k - v_{k-1}
  double tube_radius = 2.0;
  double max_progress_rate = 30.0;  // m/s
  double speed_cap = 12.0;          // soft cap on v_x, m/s
  double slack_linear = 500.0;
  double slack_quadratic = 5000.0;
  RegionSpec region;
  int sqp_iterations = 2;
  double proximal = 1e-3;
  QpSettings qp{.tolerance = 1e-8};

  void Validate() const;
};

struct MpccResult {
  InputVector input = InputVector::Zero();
  double progress_rate = 0.0;
  std::vector<StateVector> trajectory;
  std::vector<double> progress;
  std::vector<InputVector> inputs;
  std::vector<double> progress_rates;
  // Per stage 1..H: (tube, region) slack of the final QP.
  std::vector<Eigen::Vector2d> slacks;
  SolverStats stats;
};

class MpccController {
 public:
  MpccController(MpccConfig config, VehicleParams vehicle, TireParams tires,
                 const Track& track);

  // `theta` is the car's current arc length (unwrapped).
  MpccResult Step(const StateVector& state, double theta,
                  const ResidualModel& model);
  void Reset() {
    plan_.clear();
    rates_.clear();
  }

  const MpccConfig& config() const { return config_; }

 private:
  struct Rollout;
  Rollout Simulate(const StateVector& state, double theta,
                   const std::vector<InputVector>& inputs,
                   const std::vector<double>& rates,
                   const ResidualModel& model) const;

  MpccConfig config_;
  VehicleParams vehicle_;
  TireParams tires_;
  const Track& track_;
  std::vector<InputVector> plan_;
  std::vector<double> rates_;
};

}  // namespace split

#endif  // SPLIT_CONTROL_H_
