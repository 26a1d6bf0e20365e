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

#include "split/control.h"

#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "split/config.h"
#include "split/errors.h"
#include "split/residual.h"

namespace split {
namespace {

class ControlTest : public ::testing::Test {
 protected:
  ControlTest() : config_(DefaultScenarioConfig()) {}

  StateVector Cruise(double vx) const {
    StateVector x = StateVector::Zero();
    x[kPosX] = 10.0;
    x[kVx] = vx;
    x[kTorque] = 40.0;
    return x;
  }

  MpcReference Rollout(const StateVector& x0, int h, double dyaw) const {
    MpcReference ref;
    ref.states.push_back(x0);
    for (int k = 0; k < h; ++k) {
      ref.states.push_back(Discretize(ref.states.back(), InputVector::Zero(),
                                      config_.controller.mpc.dt,
                                      config_.vehicle, config_.tires));
      ref.inputs.push_back(InputVector::Zero());
    }
    for (int k = 1; k <= h; ++k) ref.states[k][kYaw] += dyaw;
    return ref;
  }

  ScenarioConfig config_;
};

TEST_F(ControlTest, MpcOnReferenceStaysPut) {
  MpcController mpc(config_.controller.mpc, config_.vehicle, config_.tires);
  const StateVector x0 = Cruise(8.0);
  const MpcResult r =
      mpc.Step(x0, Rollout(x0, config_.controller.mpc.horizon, 0.0), ZeroResidual());
  EXPECT_FALSE(r.stats.degraded);
  EXPECT_LT(std::abs(r.input[0]) / config_.vehicle.max_torque_rate, 1e-6);
  EXPECT_LT(std::abs(r.input[1]) / config_.vehicle.max_steer_rate, 1e-6);
}

// Condensed unconstrained least squares around the zero-input rollout.
InputVector NominalMpcOracle(const StateVector& x0, const MpcReference& ref,
                             const MpcConfig& cfg, const VehicleParams& vp,
                             const TireParams& tp) {
  const int h = cfg.horizon;
  std::vector<StateVector> traj{x0};
  std::vector<Linearization> lin;
  for (int k = 0; k < h; ++k) {
    lin.push_back(Linearize(traj[k], InputVector::Zero(), cfg.dt, vp, tp));
    traj.push_back(Discretize(traj[k], InputVector::Zero(), cfg.dt, vp, tp));
  }
  // dx_k = S_k u, u stacked over stages.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(8, 2 * h);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 * h, 2 * h);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * h);
  for (int k = 0; k < h; ++k) {
    s = (lin[k].a * s).eval();
    s.block<8, 2>(0, 2 * k) += lin[k].b;
    const Eigen::VectorXd w = (k + 1 == h ? cfg.p : cfg.q);
    const Eigen::VectorXd e = traj[k + 1] - ref.states[k + 1];
    hess += 2 * s.transpose() * w.asDiagonal() * s;
    grad += 2 * s.transpose() * w.asDiagonal() * e;
    hess.block<2, 2>(2 * k, 2 * k) += 2 * Eigen::Matrix2d(cfg.r.asDiagonal());
  }
  const Eigen::VectorXd u = hess.ldlt().solve(-grad);
  return u.head<2>();
}

TEST_F(ControlTest, ZeroResidualMatchesNominalOracle) {
  MpcConfig cfg = config_.controller.mpc;
  cfg.qp.tolerance = 1e-12;
  MpcController mpc(cfg, config_.vehicle, config_.tires);
  const StateVector x0 = Cruise(8.0);
  const MpcReference ref = Rollout(x0, cfg.horizon, 0.02);
  const MpcResult r = mpc.Step(x0, ref, ZeroResidual());
  const InputVector expected =
      NominalMpcOracle(x0, ref, cfg, config_.vehicle, config_.tires);
  ASSERT_LT(std::abs(expected[1]), config_.vehicle.max_steer_rate);
  ASSERT_GT(std::abs(expected[1]), 1e-3);
  EXPECT_LT(std::abs(r.input[0] - expected[0]) / config_.vehicle.max_torque_rate,
            1e-8);
  EXPECT_LT(std::abs(r.input[1] - expected[1]) / config_.vehicle.max_steer_rate,
            1e-8);
}

TEST_F(ControlTest, EmptyCommitteeEqualsZeroResidual) {
  DictionaryStore store(config_.hyperparameters, config_.region, config_.learner,
                        config_.vehicle, config_.tires);
  const CommitteeResidual empty(store.Snapshot(), config_.hyperparameters,
                                config_.region, config_.controller.bcm,
                                config_.vehicle);
  const StateVector x0 = Cruise(8.0);
  const MpcReference ref = Rollout(x0, config_.controller.mpc.horizon, 0.02);
  MpcController a(config_.controller.mpc, config_.vehicle, config_.tires);
  MpcController b(config_.controller.mpc, config_.vehicle, config_.tires);
  EXPECT_EQ(a.Step(x0, ref, ZeroResidual()).input,
            b.Step(x0, ref, empty).input);
}

TEST_F(ControlTest, HybridStepIsDiscretizePlusResidual) {
  DictionaryStore store(config_.hyperparameters, config_.region, config_.learner,
                        config_.vehicle, config_.tires);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-0.05, 0.05), y(-0.1, 0.1);
  for (int i = 0; i < 200; ++i) {
    store.TryInsert({Feature(a(rng), a(rng), a(rng)), {y(rng), y(rng), y(rng)}},
                    10.0);
  }
  const CommitteeResidual model(store.Snapshot(), config_.hyperparameters,
                                config_.region, config_.controller.bcm,
                                config_.vehicle);
  StateVector x = Cruise(9.0);
  x[kVy] = 0.1;
  x[kYawRate] = 0.2;
  x[kSteer] = 0.03;
  const InputVector u(100.0, 0.2);
  Prediction g;
  const StateVector next =
      HybridStep(x, u, 0.05, config_.vehicle, config_.tires, model, &g);
  EXPECT_FALSE(g.mean.isZero());
  const StateVector expected =
      Discretize(x, u, 0.05, config_.vehicle, config_.tires) +
      VelocitySelector() * g.mean;
  EXPECT_EQ(next, expected);
  EXPECT_EQ(model.Evaluate(x).mean, g.mean);
}

TEST_F(ControlTest, MpcDeterministic) {
  const StateVector x0 = Cruise(8.0);
  const MpcReference ref = Rollout(x0, config_.controller.mpc.horizon, 0.03);
  MpcController a(config_.controller.mpc, config_.vehicle, config_.tires);
  MpcController b(config_.controller.mpc, config_.vehicle, config_.tires);
  const MpcResult ra = a.Step(x0, ref, ZeroResidual());
  const MpcResult rb = b.Step(x0, ref, ZeroResidual());
  EXPECT_EQ(ra.input, rb.input);
  EXPECT_EQ(ra.trajectory, rb.trajectory);
}

TEST_F(ControlTest, MpcRejectsShortReference) {
  MpcController mpc(config_.controller.mpc, config_.vehicle, config_.tires);
  MpcReference ref = Rollout(Cruise(8.0), 5, 0.0);
  EXPECT_THROW(mpc.Step(Cruise(8.0), ref, ZeroResidual()), DomainError);
}

TEST_F(ControlTest, MpccStraightTrackGoesStraight) {
  const Track track = Track::Straight(400.0, 2.0);
  MpccConfig cfg = config_.controller.mpcc;
  MpccController mpcc(cfg, config_.vehicle, config_.tires, track);
  const MpccResult r = mpcc.Step(Cruise(8.0), 10.0, ZeroResidual());
  EXPECT_FALSE(r.stats.degraded);
  EXPECT_LT(std::abs(r.input[1]) / config_.vehicle.max_steer_rate, 1e-6);
  EXPECT_GT(r.progress_rate, 0.0);
  for (const auto& s : r.slacks) EXPECT_LT(s.maxCoeff(), 1e-6);
  for (const auto& x : r.trajectory) EXPECT_LT(std::abs(x[kPosY]), 1e-6);
}

TEST_F(ControlTest, MpccDeterministicAndWarmStarted) {
  const Track track = Track::Straight(400.0, 2.0);
  MpccController a(config_.controller.mpcc, config_.vehicle, config_.tires, track);
  MpccController b(config_.controller.mpcc, config_.vehicle, config_.tires, track);
  StateVector x = Cruise(8.0);
  x[kPosY] = 0.5;
  const MpccResult ra = a.Step(x, 10.0, ZeroResidual());
  const MpccResult rb = b.Step(x, 10.0, ZeroResidual());
  EXPECT_EQ(ra.input, rb.input);
  EXPECT_EQ(ra.progress_rate, rb.progress_rate);
  // Offset to the left is corrected by steering right.
  EXPECT_LT(ra.trajectory.back()[kPosY], 0.5);
}

TEST_F(ControlTest, ConfigValidation) {
  MpcConfig mpc;
  mpc.horizon = 0;
  EXPECT_THROW(mpc.Validate(), ConfigError);
  mpc = MpcConfig();
  mpc.sqp_iterations = 4;
  EXPECT_THROW(mpc.Validate(), ConfigError);
  MpccConfig mpcc;
  mpcc.slack_quadratic = 0;
  EXPECT_THROW(mpcc.Validate(), ConfigError);
}

}  // namespace
}  // namespace split
