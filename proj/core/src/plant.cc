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

#include "split/plant.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace split {
namespace {

struct PerturbedForceModel {
  const VehicleParams& params;
  const TireParams& tires;
  const PlantPerturbation& perturbation;
  TireForces operator()(const StateVector& x) const {
    return PerturbedTireForces(x, params, tires, perturbation);
  }
};

double Derate(double fx, double peak) {
  const double ratio = fx / peak;
  return std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
}

void CheckEnvelope(const StateVector& x, const VehicleParams& params,
                   const SafeEnvelope& envelope) {
  const bool ok = std::isfinite(x.sum()) && x[kVx] >= params.min_speed &&
                  x[kVx] <= envelope.max_speed &&
                  std::abs(x[kVy]) <= envelope.max_lateral_speed &&
                  std::abs(x[kYawRate]) <= envelope.max_yaw_rate;
  if (!ok) {
    throw DomainError("plant left safe envelope: v_x=" +
                      std::to_string(x[kVx]) + " v_y=" +
                      std::to_string(x[kVy]) + " r=" +
                      std::to_string(x[kYawRate]));
  }
}

void AddNoise(StateVector& x, const Eigen::Vector3d& sigma,
              std::mt19937_64& rng) {
  const int rows[3] = {kVx, kVy, kYawRate};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    if (sigma[i] > 0.0) x[rows[i]] += sigma[i] * normal(rng);
  }
}

}  // namespace

PlantPerturbation PlantPerturbation::Default() {
  PlantPerturbation p;
  p.mu_scale = 0.8;
  p.coupling_on = true;
  p.torque_gain = 0.9;
  p.measurement_noise = {0.01, 0.01, 0.005};
  return p;
}

void PlantPerturbation::Validate() const {
  if (!(mu_scale > 0.0 && mu_scale <= 1.5)) {
    throw ConfigError("perturbation.mu_scale must lie in (0, 1.5]");
  }
  if (!(b_scale > 0.0) || !(c_scale > 0.0) || !(torque_gain > 0.0)) {
    throw ConfigError("perturbation scales must be strictly positive");
  }
  if (!(measurement_noise.array() >= 0.0).all()) {
    throw ConfigError("perturbation.measurement_noise must be non-negative");
  }
}

TireForces PerturbedTireForces(const StateVector& state,
                               const VehicleParams& params,
                               const TireParams& tires,
                               const PlantPerturbation& p) {
  TireParams scaled = tires;
  scaled.b_front *= p.b_scale;
  scaled.b_rear *= p.b_scale;
  scaled.c_front *= p.c_scale;
  scaled.c_rear *= p.c_scale;
  scaled.d_front *= p.mu_scale;
  scaled.d_rear *= p.mu_scale;

  const SlipAngles slip = ComputeSlipAngles(state, params);
  const LongitudinalForcePair fx =
      LongitudinalForces(p.torque_gain * state[kTorque], params);
  TireForces f{fx.front, -TireLateralForce(slip.front, Axle::kFront, scaled),
               fx.rear, TireLateralForce(slip.rear, Axle::kRear, scaled)};
  if (p.coupling_on) {
    f.front_y *= Derate(f.front_x, scaled.d_front);
    f.rear_y *= Derate(f.rear_x, scaled.d_rear);
  }
  return f;
}

StateVector PlantPropagate(const StateVector& state, const InputVector& input,
                           double dt, const VehicleParams& params,
                           const TireParams& tires,
                           const PlantPerturbation& perturbation) {
  return Rk4Step(state, input, dt, params,
                 PerturbedForceModel{params, tires, perturbation});
}

StateVector PlantStep(const StateVector& state, const InputVector& input,
                      double dt, const VehicleParams& params,
                      const TireParams& tires,
                      const PlantPerturbation& perturbation,
                      std::uint64_t seed, const SafeEnvelope& envelope) {
  StateVector next =
      PlantPropagate(state, input, dt, params, tires, perturbation);
  CheckEnvelope(next, params, envelope);
  std::mt19937_64 rng(seed);
  AddNoise(next, perturbation.measurement_noise, rng);
  return next;
}

Plant::Plant(VehicleParams params, TireParams tires,
             PlantPerturbation perturbation, SafeEnvelope envelope,
             std::uint64_t seed)
    : params_(params),
      tires_(tires),
      perturbation_(perturbation),
      envelope_(envelope),
      rng_(seed) {}

void Plant::Reset(const StateVector& state) { state_ = state; }

StateVector Plant::Step(const InputVector& input, double dt) {
  const StateVector next =
      PlantPropagate(state_, input, dt, params_, tires_, perturbation_);
  CheckEnvelope(next, params_, envelope_);
  state_ = next;
  return Measure();
}

StateVector Plant::Measure() {
  StateVector measured = state_;
  AddNoise(measured, perturbation_.measurement_noise, rng_);
  return measured;
}

}  // namespace split
