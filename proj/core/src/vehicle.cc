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

#include "split/vehicle.h"

#include <algorithm>
#include <string>

namespace split {
namespace {

void RequirePositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be strictly positive");
  }
}

struct NominalForceModel {
  const VehicleParams& params;
  const TireParams& tires;
  TireForces operator()(const StateVector& x) const {
    return NominalTireForces(x, params, tires);
  }
};

}  // namespace

void VehicleParams::Validate() const {
  RequirePositive(mass, "vehicle.mass");
  RequirePositive(yaw_inertia, "vehicle.yaw_inertia");
  RequirePositive(lf, "vehicle.lf");
  RequirePositive(lr, "vehicle.lr");
  RequirePositive(drag_coeff, "vehicle.drag_coeff");
  RequirePositive(wheel_radius, "vehicle.wheel_radius");
  RequirePositive(front_rolling_resistance, "vehicle.front_rolling_resistance");
  RequirePositive(rear_rolling_resistance, "vehicle.rear_rolling_resistance");
  RequirePositive(min_speed, "vehicle.min_speed");
  RequirePositive(max_torque, "vehicle.max_torque");
  RequirePositive(max_steer, "vehicle.max_steer");
  RequirePositive(max_torque_rate, "vehicle.max_torque_rate");
  RequirePositive(max_steer_rate, "vehicle.max_steer_rate");
  if (!(torque_split >= 0.0 && torque_split <= 1.0)) {
    throw ConfigError("vehicle.torque_split must lie in [0, 1]");
  }
  if (integration_substeps < 1 || integration_substeps > 1000) {
    throw ConfigError("vehicle.integration_substeps must lie in [1, 1000]");
  }
}

void TireParams::Validate() const {
  RequirePositive(b_front, "tire.b_front");
  RequirePositive(c_front, "tire.c_front");
  RequirePositive(d_front, "tire.d_front");
  RequirePositive(b_rear, "tire.b_rear");
  RequirePositive(c_rear, "tire.c_rear");
  RequirePositive(d_rear, "tire.d_rear");
}

SlipAngles ComputeSlipAngles(const StateVector& state,
                             const VehicleParams& params) {
  const double vx = state[kVx];
  if (!(vx >= params.min_speed)) {
    throw DomainError("slip angles undefined: v_x = " + std::to_string(vx) +
                      " below " + std::to_string(params.min_speed));
  }
  const double vy = state[kVy];
  const double r = state[kYawRate];
  return {std::atan((vy + params.lf * r) / vx) - state[kSteer],
          std::atan((-vy + params.lr * r) / vx)};
}

SlipAngles ComputeSlipAngles(const VehicleState& state,
                             const VehicleParams& params) {
  return ComputeSlipAngles(state.ToVector(), params);
}

double TireLateralForce(double slip, Axle axle, const TireParams& tires) {
  if (axle == Axle::kFront) {
    return tires.d_front *
           std::sin(tires.c_front * std::atan(tires.b_front * slip));
  }
  return tires.d_rear * std::sin(tires.c_rear * std::atan(tires.b_rear * slip));
}

LongitudinalForcePair LongitudinalForces(double torque,
                                         const VehicleParams& params) {
  const double drive = torque / params.wheel_radius;
  return {params.torque_split * drive - params.front_rolling_resistance,
          (1.0 - params.torque_split) * drive - params.rear_rolling_resistance};
}

TireForces NominalTireForces(const StateVector& state,
                             const VehicleParams& params,
                             const TireParams& tires) {
  const SlipAngles slip = ComputeSlipAngles(state, params);
  const LongitudinalForcePair fx = LongitudinalForces(state[kTorque], params);
  return {fx.front, -TireLateralForce(slip.front, Axle::kFront, tires), fx.rear,
          TireLateralForce(slip.rear, Axle::kRear, tires)};
}

StateVector BodyDynamics(const StateVector& state, const InputVector& input,
                         const TireForces& f, const VehicleParams& params) {
  const double yaw = state[kYaw];
  const double vx = state[kVx];
  const double vy = state[kVy];
  const double r = state[kYawRate];
  const double steer = state[kSteer];
  const double cs = std::cos(steer);
  const double sn = std::sin(steer);
  const double drag = params.drag_coeff * vx * vx;

  StateVector dx;
  dx[kPosX] = vx * std::cos(yaw) - vy * std::sin(yaw);
  dx[kPosY] = vx * std::sin(yaw) + vy * std::cos(yaw);
  dx[kYaw] = r;
  dx[kVx] = (f.rear_x - drag - f.front_y * sn + f.front_x * cs) / params.mass +
            vy * r;
  dx[kVy] = (f.rear_y + f.front_y * cs + f.front_x * sn) / params.mass - vx * r;
  dx[kYawRate] =
      ((f.front_y * cs + f.front_x * sn) * params.lf - f.rear_y * params.lr) /
      params.yaw_inertia;
  dx[kTorque] = input[0];
  dx[kSteer] = input[1];
  return dx;
}

StateVector ContinuousDynamics(const VehicleState& state,
                               const ControlInput& input,
                               const VehicleParams& params,
                               const TireParams& tires) {
  const StateVector x = state.ToVector();
  return BodyDynamics(x, input.ToVector(), NominalTireForces(x, params, tires),
                      params);
}

StateVector Discretize(const StateVector& state, const InputVector& input,
                       double dt, const VehicleParams& params,
                       const TireParams& tires) {
  return Rk4Step(state, input, dt, params, NominalForceModel{params, tires});
}

VehicleState Discretize(const VehicleState& state, const ControlInput& input,
                        double dt, const VehicleParams& params,
                        const TireParams& tires) {
  return VehicleState::FromVector(
      Discretize(state.ToVector(), input.ToVector(), dt, params, tires));
}

Linearization Linearize(const StateVector& state, const InputVector& input,
                        double dt, const VehicleParams& params,
                        const TireParams& tires) {
  Linearization lin;
  for (int i = 0; i < kStateDim; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(state[i]));
    StateVector plus = state;
    StateVector minus = state;
    plus[i] += h;
    minus[i] -= h;
    lin.a.col(i) = (Discretize(plus, input, dt, params, tires) -
                    Discretize(minus, input, dt, params, tires)) /
                   (plus[i] - minus[i]);
  }
  for (int j = 0; j < kInputDim; ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(input[j]));
    InputVector plus = input;
    InputVector minus = input;
    plus[j] += h;
    minus[j] -= h;
    lin.b.col(j) = (Discretize(state, plus, dt, params, tires) -
                    Discretize(state, minus, dt, params, tires)) /
                   (plus[j] - minus[j]);
  }
  return lin;
}

const ResidualSelector& VelocitySelector() {
  static const ResidualSelector selector = [] {
    ResidualSelector b = ResidualSelector::Zero();
    b(kVx, 0) = 1.0;
    b(kVy, 1) = 1.0;
    b(kYawRate, 2) = 1.0;
    return b;
  }();
  return selector;
}

Eigen::Vector3d ResidualLabel(const StateVector& state, const InputVector& input,
                              const StateVector& next_measured, double dt,
                              const VehicleParams& params,
                              const TireParams& tires) {
  const StateVector predicted = Discretize(state, input, dt, params, tires);
  return VelocitySelector().transpose() * (next_measured - predicted);
}

Eigen::Vector3d SlipTorqueFeature(const StateVector& state,
                                  const VehicleParams& params) {
  const SlipAngles slip = ComputeSlipAngles(state, params);
  return {slip.front, slip.rear, state[kTorque] / params.max_torque};
}

Eigen::Matrix<double, 5, 1> StateFeature(const StateVector& state,
                                         const VehicleParams& params) {
  Eigen::Matrix<double, 5, 1> z;
  z << state[kVx], state[kVy], state[kYawRate],
      state[kTorque] / params.max_torque, state[kSteer];
  return z;
}

}  // namespace split
