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

#ifndef SPLIT_PLANT_H_
#define SPLIT_PLANT_H_

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "split/vehicle.h"

namespace split {

// Deviation of the synthetic vehicle from the nominal tire model.
struct PlantPerturbation {
  double mu_scale = 1.0;     // multiplier on D_f, D_r
  double b_scale = 1.0;      // multiplier on B_f, B_r
  double c_scale = 1.0;      // multiplier on C_f, C_r
  bool coupling_on = false;  // friction-ellipse derating of lateral force
  double torque_gain = 1.0;  // delivered / commanded torque
  Eigen::Vector3d measurement_noise = Eigen::Vector3d::Zero();  // std-devs

  static PlantPerturbation Identity() { return {}; }
  // mu 0.8, coupling on, torque gain 0.9, noise (0.01, 0.01, 0.005).
  static PlantPerturbation Default();

  void Validate() const;
};

// States beyond these bounds count as a crashed run.
struct SafeEnvelope {
  double max_speed = 60.0;
  double max_lateral_speed = 6.0;
  double max_yaw_rate = 3.0;
};

// Tire forces of the perturbed plant at a state.
TireForces PerturbedTireForces(const StateVector& state,
                               const VehicleParams& params,
                               const TireParams& tires,
                               const PlantPerturbation& perturbation);

// Noise-free propagation of the true plant state.
StateVector PlantPropagate(const StateVector& state, const InputVector& input,
                           double dt, const VehicleParams& params,
                           const TireParams& tires,
                           const PlantPerturbation& perturbation);

// One plant step followed by measurement noise on (v_x, v_y, r), drawn from
// a generator seeded with `seed`. Throws DomainError when the resulting true
// state leaves `envelope`.
StateVector PlantStep(const StateVector& state, const InputVector& input,
                      double dt, const VehicleParams& params,
                      const TireParams& tires,
                      const PlantPerturbation& perturbation,
                      std::uint64_t seed, const SafeEnvelope& envelope = {});

// Stateful plant used by the closed-loop runner: keeps the true state and
// hands out noisy measurements from one seeded stream.
class Plant {
 public:
  Plant(VehicleParams params, TireParams tires, PlantPerturbation perturbation,
        SafeEnvelope envelope, std::uint64_t seed);

  void Reset(const StateVector& state);
  // Advances the true state and returns the measurement.
  StateVector Step(const InputVector& input, double dt);

  const StateVector& true_state() const { return state_; }
  StateVector Measure();

 private:
  VehicleParams params_;
  TireParams tires_;
  PlantPerturbation perturbation_;
  SafeEnvelope envelope_;
  std::mt19937_64 rng_;
  StateVector state_ = StateVector::Zero();
};

}  // namespace split

#endif  // SPLIT_PLANT_H_
