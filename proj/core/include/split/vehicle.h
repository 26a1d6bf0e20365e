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

#ifndef SPLIT_VEHICLE_H_
#define SPLIT_VEHICLE_H_

#include <cmath>

#include <Eigen/Core>

#include "split/errors.h"

namespace split {

inline constexpr int kStateDim = 8;
inline constexpr int kInputDim = 2;
inline constexpr double kGravity = 9.81;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using InputVector = Eigen::Matrix<double, kInputDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;
// Selector of the velocity rows (v_x, v_y, r) the residual model acts on.
using ResidualSelector = Eigen::Matrix<double, kStateDim, 3>;

// Position of each quantity inside StateVector.
enum StateIndex : int {
  kPosX = 0,
  kPosY = 1,
  kYaw = 2,
  kVx = 3,
  kVy = 4,
  kYawRate = 5,
  kTorque = 6,
  kSteer = 7,
};

struct VehicleState {
  double x = 0.0;         // m
  double y = 0.0;         // m
  double yaw = 0.0;       // rad
  double vx = 0.0;        // m/s
  double vy = 0.0;        // m/s
  double yaw_rate = 0.0;  // rad/s
  double torque = 0.0;    // N m
  double steer = 0.0;     // rad

  StateVector ToVector() const {
    StateVector v;
    v << x, y, yaw, vx, vy, yaw_rate, torque, steer;
    return v;
  }
  static VehicleState FromVector(const StateVector& v) {
    return {v[kPosX], v[kPosY],     v[kYaw],    v[kVx],
            v[kVy],   v[kYawRate], v[kTorque], v[kSteer]};
  }
};

struct ControlInput {
  double torque_rate = 0.0;  // N m / s
  double steer_rate = 0.0;   // rad / s

  InputVector ToVector() const { return {torque_rate, steer_rate}; }
  static ControlInput FromVector(const InputVector& u) { return {u[0], u[1]}; }
};

// Calibrated chassis quantities plus actuator limits.
struct VehicleParams {
  double mass = 900.0;                 // kg
  double yaw_inertia = 1100.0;         // kg m^2
  double lf = 1.05;                    // m, CG to front axle
  double lr = 1.45;                    // m, CG to rear axle
  double drag_coeff = 0.4;             // N s^2 / m^2
  double torque_split = 0.6;           // front share of torque
  double wheel_radius = 0.3;           // m
  double front_rolling_resistance = 40.0;  // N
  double rear_rolling_resistance = 40.0;   // N

  double min_speed = 0.5;       // m/s, slip-angle guard
  int integration_substeps = 8;  // RK4 steps per sampling interval
  double max_torque = 1000.0;   // N m
  double max_steer = 0.4;       // rad
  double max_torque_rate = 4000.0;  // N m / s
  double max_steer_rate = 1.5;      // rad / s

  double WheelBase() const { return lf + lr; }
  double FrontStaticLoad() const { return mass * kGravity * lr / WheelBase(); }
  double RearStaticLoad() const { return mass * kGravity * lf / WheelBase(); }

  // Throws ConfigError when a field is out of range.
  void Validate() const;
};

// Simplified Magic Formula coefficients; D is the peak force in N.
struct TireParams {
  double b_front = 10.0;
  double c_front = 1.5;
  double d_front = 5050.0;
  double b_rear = 12.0;
  double c_rear = 1.5;
  double d_rear = 3650.0;

  void Validate() const;
};

enum class Axle { kFront, kRear };

struct SlipAngles {
  double front = 0.0;
  double rear = 0.0;
};

struct LongitudinalForcePair {
  double front = 0.0;
  double rear = 0.0;
};

// Body-frame tire forces. The front lateral force is the force acting on the
// chassis (positive to the left).
struct TireForces {
  double front_x = 0.0;
  double front_y = 0.0;
  double rear_x = 0.0;
  double rear_y = 0.0;
};

// Slip angles with the front angle measured as atan((v_y + l_f r) / v_x) - delta.
// Throws DomainError when v_x < params.min_speed.
SlipAngles ComputeSlipAngles(const VehicleState& state,
                             const VehicleParams& params);
SlipAngles ComputeSlipAngles(const StateVector& state,
                             const VehicleParams& params);

// D sin(C atan(B alpha)) for the chosen axle.
double TireLateralForce(double slip, Axle axle, const TireParams& tires);

LongitudinalForcePair LongitudinalForces(double torque,
                                         const VehicleParams& params);

// Nominal tire forces at a state. The front slip angle is measured opposite
// to the chassis convention, so the chassis force is -D sin(C atan(B alpha_f)).
TireForces NominalTireForces(const StateVector& state,
                             const VehicleParams& params,
                             const TireParams& tires);

// Single-track equations of motion for an arbitrary tire-force model.
StateVector BodyDynamics(const StateVector& state, const InputVector& input,
                         const TireForces& forces, const VehicleParams& params);

// Fixed-step RK4 over BodyDynamics with forces supplied by `force_model`,
// a callable StateVector -> TireForces; params.integration_substeps equal
// steps cover dt.
template <typename ForceModel>
StateVector Rk4Step(const StateVector& state, const InputVector& input,
                    double dt, const VehicleParams& params,
                    const ForceModel& force_model) {
  auto f = [&](const StateVector& x) {
    return BodyDynamics(x, input, force_model(x), params);
  };
  const int n = params.integration_substeps;
  const double h = dt / n;
  StateVector x = state;
  for (int i = 0; i < n; ++i) {
    const StateVector k1 = f(x);
    const StateVector k2 = f(x + 0.5 * h * k1);
    const StateVector k3 = f(x + 0.5 * h * k2);
    const StateVector k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

StateVector ContinuousDynamics(const VehicleState& state,
                               const ControlInput& input,
                               const VehicleParams& params,
                               const TireParams& tires);

// The discrete nominal model f(x_k, u_k): fixed-step RK4 across dt.
StateVector Discretize(const StateVector& state, const InputVector& input,
                       double dt, const VehicleParams& params,
                       const TireParams& tires);
VehicleState Discretize(const VehicleState& state, const ControlInput& input,
                        double dt, const VehicleParams& params,
                        const TireParams& tires);

struct Linearization {
  StateMatrix a;
  InputMatrix b;
};

// Central-difference Jacobians of Discretize, step 1e-5 * max(1, |v|).
Linearization Linearize(const StateVector& state, const InputVector& input,
                        double dt, const VehicleParams& params,
                        const TireParams& tires);

// B_d = [0 I 0]^T; its pseudo-inverse is its transpose.
const ResidualSelector& VelocitySelector();

// y = B_d^+ (x_next - f(x_k, u_k)).
Eigen::Vector3d ResidualLabel(const StateVector& state, const InputVector& input,
                              const StateVector& next_measured, double dt,
                              const VehicleParams& params,
                              const TireParams& tires);

// Residual-model features (alpha_f, alpha_r, T / T_max).
Eigen::Vector3d SlipTorqueFeature(const StateVector& state,
                                  const VehicleParams& params);
// Five-feature variant (v_x, v_y, r, T / T_max, delta) used for ablations.
Eigen::Matrix<double, 5, 1> StateFeature(const StateVector& state,
                                         const VehicleParams& params);

}  // namespace split

#endif  // SPLIT_VEHICLE_H_
