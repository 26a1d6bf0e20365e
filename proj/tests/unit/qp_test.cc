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

#include "split/qp.h"

#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "active_set_qp.h"

namespace split {
namespace {

QpProblem Dense(const Eigen::MatrixXd& p, const Eigen::VectorXd& q,
                const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                const Eigen::MatrixXd& g, const Eigen::VectorXd& h) {
  QpProblem prob;
  prob.hessian = p.sparseView();
  prob.gradient = q;
  prob.eq_matrix = a.sparseView();
  prob.eq_rhs = b;
  prob.ineq_matrix = g.sparseView();
  prob.ineq_rhs = h;
  return prob;
}

TEST(Qp, UnconstrainedTwoVariables) {
  Eigen::Matrix2d p;
  p << 4, 1, 1, 3;
  const Eigen::Vector2d q(1, 2);
  const QpSolution sol = SolveQp(Dense(p, q, Eigen::MatrixXd(0, 2),
                                       Eigen::VectorXd(0), Eigen::MatrixXd(0, 2),
                                       Eigen::VectorXd(0)));
  ASSERT_EQ(sol.status, QpStatus::kSolved);
  const Eigen::Vector2d expected = -p.inverse() * q;
  EXPECT_LT((sol.x - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Qp, BoxBoundActive) {
  // min (x - 3)^2 / 2 s.t. -1 <= x <= 1.
  Eigen::MatrixXd p(1, 1), g(2, 1);
  p << 1;
  g << 1, -1;
  const QpSolution sol =
      SolveQp(Dense(p, Eigen::VectorXd::Constant(1, -3), Eigen::MatrixXd(0, 1),
                    Eigen::VectorXd(0), g, Eigen::Vector2d(1, 1)));
  ASSERT_EQ(sol.status, QpStatus::kSolved);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-8);
  EXPECT_NEAR(sol.ineq_dual[0], 2.0, 1e-6);
}

TEST(Qp, RandomTwentyVariablesMatchActiveSetOracle) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  auto random = [&](int r, int c) {
    return Eigen::MatrixXd::NullaryExpr(r, c, [&] { return n(rng); }).eval();
  };
  int active_total = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd m = random(20, 20);
    const Eigen::MatrixXd p = m * m.transpose() + Eigen::MatrixXd::Identity(20, 20);
    const Eigen::VectorXd q = 5 * random(20, 1);
    const Eigen::MatrixXd a = random(2, 20);
    const Eigen::VectorXd b = random(2, 1);
    const Eigen::MatrixXd g = random(12, 20);
    const Eigen::VectorXd h = random(12, 1).cwiseAbs();
    const auto ref = oracle::EnumerateActiveSets(p, q, a, b, g, h);
    ASSERT_TRUE(ref.has_value());
    const QpSolution sol = SolveQp(Dense(p, q, a, b, g, h), {.tolerance = 1e-10});
    ASSERT_EQ(sol.status, QpStatus::kSolved);
    EXPECT_LT((sol.x - *ref).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(sol.kkt_residual, 1e-6);
    active_total += ((h - g * *ref).array() < 1e-9).count();
  }
  EXPECT_GT(active_total, 0);
}

TEST(Qp, Deterministic) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 1);
  const Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(8, 8, [&] { return n(rng); });
  const Eigen::MatrixXd p = m * m.transpose();
  const Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(8, [&] { return n(rng); });
  Eigen::MatrixXd g(16, 8);
  g << Eigen::MatrixXd::Identity(8, 8), -Eigen::MatrixXd::Identity(8, 8);
  const QpProblem prob = Dense(p, q, Eigen::MatrixXd(0, 8), Eigen::VectorXd(0), g,
                               Eigen::VectorXd::Ones(16));
  const QpSolution s1 = SolveQp(prob);
  const QpSolution s2 = SolveQp(prob);
  EXPECT_EQ(s1.x, s2.x);
  EXPECT_EQ(s1.iterations, s2.iterations);
}

TEST(Qp, IterationCapReported) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd g(6, 3);
  g << Eigen::MatrixXd::Identity(3, 3), -Eigen::MatrixXd::Identity(3, 3);
  const QpSolution sol =
      SolveQp(Dense(p, Eigen::Vector3d(10, -10, 3), Eigen::MatrixXd(0, 3),
                    Eigen::VectorXd(0), g, Eigen::VectorXd::Ones(6)),
              {.max_iterations = 1});
  EXPECT_EQ(sol.status, QpStatus::kMaxIter);
}

TEST(Qp, InfeasibleDetected) {
  // x <= -1 and -x <= -1.
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd g(2, 1);
  g << 1, -1;
  const QpSolution sol =
      SolveQp(Dense(p, Eigen::VectorXd::Zero(1), Eigen::MatrixXd(0, 1),
                    Eigen::VectorXd(0), g, Eigen::Vector2d(-1, -1)));
  EXPECT_NE(sol.status, QpStatus::kSolved);
}

}  // namespace
}  // namespace split
