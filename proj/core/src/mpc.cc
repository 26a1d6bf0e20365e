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
#include <cmath>
#include <utility>

#include "qp_builder.h"
#include "split/control.h"
#include "split/errors.h"

namespace split {
namespace {

// Torque enters the QP in kN m, its rate in kN m / s.
constexpr double kTorqueScale = 1e-3;

StateVector StateScale() {
  StateVector s = StateVector::Ones();
  s[kTorque] = kTorqueScale;
  return s;
}

InputVector InputScale() { return {kTorqueScale, 1.0}; }

// Any stopping reason is fine once the returned point satisfies the KKT
// conditions to the controller's tolerance.
bool Acceptable(const QpSolution& sol) {
  return sol.x.allFinite() && sol.kkt_residual < 1e-6;
}

}  // namespace

void MpcConfig::Validate() const {
  if (horizon < 1) throw ConfigError("mpc.horizon must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("mpc.dt must be > 0");
  if ((q.array() < 0.0).any() || (p.array() < 0.0).any()) {
    throw ConfigError("mpc state weights must be >= 0");
  }
  if (!(r.array() > 0.0).all()) throw ConfigError("mpc.r must be > 0");
  if (!(q_lateral >= 0.0)) throw ConfigError("mpc.q_lateral must be >= 0");
  if (sqp_iterations < 1 || sqp_iterations > 3) {
    throw ConfigError("mpc.sqp_iterations must lie in [1, 3]");
  }
}

MpcReference TrackReference(const Track& track, double theta, double yaw,
                            double speed, const MpcConfig& config) {
  MpcReference ref;
  const int h = config.horizon;
  ref.states.resize(h + 1);
  ref.inputs.assign(h, InputVector::Zero());
  ref.normals.resize(h + 1);
  double heading = yaw;
  for (int k = 0; k <= h; ++k) {
    const double s = theta + speed * config.dt * k;
    const Eigen::Vector2d c = track.Position(s);
    const Eigen::Vector2d t = track.Tangent(s);
    heading = UnwrapNear(std::atan2(t.y(), t.x()), heading);
    StateVector x = StateVector::Zero();
    x[kPosX] = c.x();
    x[kPosY] = c.y();
    x[kYaw] = heading;
    x[kVx] = speed;
    x[kYawRate] = speed * track.Curvature(s);
    ref.states[k] = x;
    ref.normals[k] = {-t.y(), t.x()};
  }
  return ref;
}

MpcController::MpcController(MpcConfig config, VehicleParams vehicle,
                             TireParams tires)
    : config_(std::move(config)), vehicle_(vehicle), tires_(tires) {
  config_.Validate();
}

MpcResult MpcController::Step(const StateVector& state,
                              const MpcReference& reference,
                              const ResidualModel& model) {
  const int h = config_.horizon;
  if (static_cast<int>(reference.states.size()) < h + 1 ||
      static_cast<int>(reference.inputs.size()) < h) {
    throw DomainError("mpc reference shorter than the horizon");
  }
  const bool lateral = config_.q_lateral > 0.0 &&
                       static_cast<int>(reference.normals.size()) >= h + 1;
  const double dt = config_.dt;
  const StateVector sx = StateScale();
  const InputVector su = InputScale();

  // Previous plan shifted by one stage.
  std::vector<InputVector> plan(h, InputVector::Zero());
  if (static_cast<int>(plan_.size()) == h) {
    for (int k = 0; k + 1 < h; ++k) plan[k] = plan_[k + 1];
    plan[h - 1] = plan_[h - 1];
  }

  auto x_index = [](int k) { return 10 * k; };
  auto u_index = [](int k) { return 10 * k + 8; };
  const int n = 10 * h + 8;

  MpcResult result;
  std::vector<StateVector> traj(h + 1);
  for (int iter = 0; iter < config_.sqp_iterations; ++iter) {
    traj[0] = state;
    std::vector<Linearization> lin(h);
    std::vector<StateVector> offset(h);
    for (int k = 0; k < h; ++k) {
      Prediction g;
      traj[k + 1] = HybridStep(traj[k], plan[k], dt, vehicle_, tires_, model,
                               &g);
      lin[k] = Linearize(traj[k], plan[k], dt, vehicle_, tires_);
      offset[k] = traj[k + 1] - lin[k].a * traj[k] - lin[k].b * plan[k];
    }

    internal::QpBuilder qp(n);
    for (int i = 0; i < 8; ++i) {
      qp.AddEquality({{x_index(0) + i, 1.0}}, sx[i] * state[i]);
    }
    std::vector<internal::Term> row;
    for (int k = 0; k < h; ++k) {
      for (int i = 0; i < 8; ++i) {
        row.clear();
        row.emplace_back(x_index(k + 1) + i, 1.0);
        for (int j = 0; j < 8; ++j) {
          const double a = lin[k].a(i, j);
          if (a != 0.0) row.emplace_back(x_index(k) + j, -sx[i] * a / sx[j]);
        }
        for (int j = 0; j < 2; ++j) {
          const double b = lin[k].b(i, j);
          if (b != 0.0) row.emplace_back(u_index(k) + j, -sx[i] * b / su[j]);
        }
        qp.AddEquality(row, sx[i] * offset[k][i]);
      }
    }
    for (int k = 1; k <= h; ++k) {
      const StateWeights& w = k == h ? config_.p : config_.q;
      const StateVector& r = reference.states[k];
      for (int i = 0; i < 8; ++i) {
        if (w[i] > 0.0) {
          qp.AddSquare(x_index(k) + i, sx[i] * r[i], w[i] / (sx[i] * sx[i]));
        }
      }
      if (lateral) {
        const Eigen::Vector2d& nrm = reference.normals[k];
        qp.AddSquaredAffine(
            {{x_index(k) + kPosX, nrm.x()}, {x_index(k) + kPosY, nrm.y()}},
            -nrm.dot(r.head<2>()), config_.q_lateral);
      }
      qp.AddBounds(x_index(k) + kTorque, -sx[kTorque] * vehicle_.max_torque,
                   sx[kTorque] * vehicle_.max_torque);
      qp.AddBounds(x_index(k) + kSteer, -vehicle_.max_steer,
                   vehicle_.max_steer);
    }
    for (int k = 0; k < h; ++k) {
      for (int j = 0; j < 2; ++j) {
        qp.AddSquare(u_index(k) + j, su[j] * reference.inputs[k][j],
                     config_.r[j] / (su[j] * su[j]));
      }
      qp.AddBounds(u_index(k), -su[0] * vehicle_.max_torque_rate,
                   su[0] * vehicle_.max_torque_rate);
      qp.AddBounds(u_index(k) + 1, -vehicle_.max_steer_rate,
                   vehicle_.max_steer_rate);
    }

    const QpSolution sol = SolveQp(qp.Build(), config_.qp);
    result.stats.sqp_iterations = iter + 1;
    result.stats.qp_iterations += sol.iterations;
    result.stats.status = sol.status;
    result.stats.kkt_residual = sol.kkt_residual;
    if (!Acceptable(sol)) {
      result.stats.degraded = true;
      break;
    }
    for (int k = 0; k < h; ++k) {
      plan[k] = sol.x.segment<2>(u_index(k)).cwiseQuotient(su);
    }
  }

  if (result.stats.degraded) {
    // Previous plan, clipped to the actuator limits.
    result.input = plan[0];
  } else {
    traj[0] = state;
    for (int k = 0; k < h; ++k) {
      traj[k + 1] = HybridStep(traj[k], plan[k], dt, vehicle_, tires_, model);
    }
    result.input = plan[0];
  }
  result.input[0] = std::clamp(result.input[0], -vehicle_.max_torque_rate,
                               vehicle_.max_torque_rate);
  result.input[1] = std::clamp(result.input[1], -vehicle_.max_steer_rate,
                               vehicle_.max_steer_rate);
  result.trajectory = traj;
  result.inputs = plan;
  plan_ = std::move(plan);
  return result;
}

}  // namespace split
