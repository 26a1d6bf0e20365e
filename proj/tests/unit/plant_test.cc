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

#include <gtest/gtest.h>

#include "split/errors.h"
#include "split/vehicle.h"

namespace split {
namespace {

StateVector Cornering() {
  StateVector x = StateVector::Zero();
  x[kVx] = 10.0;
  x[kVy] = 0.2;
  x[kYawRate] = 0.4;
  x[kTorque] = 200.0;
  x[kSteer] = 0.06;
  return x;
}

TEST(Plant, IdentityPerturbationMatchesNominalBitForBit) {
  const StateVector x = Cornering();
  const InputVector u(300, 0.1);
  const StateVector a = PlantStep(x, u, 0.05, VehicleParams{}, TireParams{},
                                  PlantPerturbation::Identity(), 42);
  const StateVector b = Discretize(x, u, 0.05, VehicleParams{}, TireParams{});
  EXPECT_TRUE((a.array() == b.array()).all());
}

TEST(Plant, ReducedFrictionLabelOpposesNominalForceError) {
  PlantPerturbation p = PlantPerturbation::Identity();
  p.mu_scale = 0.8;
  const VehicleParams v;
  const TireParams t;
  const StateVector x = Cornering();
  const InputVector u = InputVector::Zero();
  const StateVector next = PlantStep(x, u, 0.05, v, t, p, 1);
  const Eigen::Vector3d y = ResidualLabel(x, u, next, 0.05, v, t);
  EXPECT_GT(y.norm(), 1e-3);
  // The plant delivers less lateral force than the nominal model in the
  // direction of the turn, so the lateral-velocity label has the opposite
  // sign of the nominal net lateral force.
  const TireForces nominal = NominalTireForces(x, v, t);
  const TireForces actual = PerturbedTireForces(x, v, t, p);
  const double nominal_fy = nominal.front_y + nominal.rear_y;
  const double delta_fy =
      (actual.front_y + actual.rear_y) - nominal_fy;
  EXPECT_LT(delta_fy * nominal_fy, 0.0);
  EXPECT_LT(y[1] * nominal_fy, 0.0);
}

TEST(Plant, SeededRunsAreIdentical) {
  auto run = [] {
    Plant plant(VehicleParams{}, TireParams{}, PlantPerturbation::Default(),
                SafeEnvelope{}, 9);
    plant.Reset(Cornering());
    StateVector last;
    for (int i = 0; i < 50; ++i) last = plant.Step(InputVector(100, 0.05), 0.05);
    return last;
  };
  EXPECT_TRUE((run().array() == run().array()).all());
}

TEST(Plant, NoiseOnlyOnVelocityRows) {
  Plant plant(VehicleParams{}, TireParams{}, PlantPerturbation::Default(),
              SafeEnvelope{}, 5);
  plant.Reset(Cornering());
  const StateVector measured = plant.Step(InputVector(100, 0.05), 0.05);
  const StateVector truth = plant.true_state();
  for (int i : {kPosX, kPosY, kYaw, kTorque, kSteer}) {
    EXPECT_EQ(measured[i], truth[i]);
  }
  EXPECT_NE(measured[kVx], truth[kVx]);
}

TEST(Plant, LeavingEnvelopeThrows) {
  StateVector x = Cornering();
  x[kYawRate] = 10.0;
  EXPECT_THROW(PlantStep(x, InputVector::Zero(), 0.05, VehicleParams{},
                         TireParams{}, PlantPerturbation::Identity(), 1),
               DomainError);
}

TEST(Plant, IdentityLabelsZeroAlongTrajectory) {
  const VehicleParams v;
  const TireParams t;
  StateVector x = Cornering();
  for (int i = 0; i < 40; ++i) {
    const InputVector u(50.0 * std::sin(0.3 * i), 0.2 * std::cos(0.2 * i));
    const StateVector next =
        PlantStep(x, u, 0.05, v, t, PlantPerturbation::Identity(), i);
    EXPECT_TRUE(ResidualLabel(x, u, next, 0.05, v, t).isZero(0.0));
    x = next;
  }
}

TEST(Plant, LabelsIgnorePose) {
  const VehicleParams v;
  const TireParams t;
  PlantPerturbation p = PlantPerturbation::Default();
  p.measurement_noise.setZero();
  const StateVector a = Cornering();
  StateVector b = a;
  b[kPosX] = 120.0;
  b[kPosY] = -40.0;
  b[kYaw] = 2.1;
  const InputVector u(250, -0.2);
  const Eigen::Vector3d ya =
      ResidualLabel(a, u, PlantStep(a, u, 0.05, v, t, p, 1), 0.05, v, t);
  const Eigen::Vector3d yb =
      ResidualLabel(b, u, PlantStep(b, u, 0.05, v, t, p, 1), 0.05, v, t);
  EXPECT_LT((ya - yb).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Plant, PerturbationValidation) {
  PlantPerturbation p;
  p.mu_scale = 2.0;
  EXPECT_THROW(p.Validate(), ConfigError);
  PlantPerturbation q;
  q.measurement_noise[1] = -0.1;
  EXPECT_THROW(q.Validate(), ConfigError);
}

}  // namespace
}  // namespace split
