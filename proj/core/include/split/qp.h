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

#ifndef SPLIT_QP_H_
#define SPLIT_QP_H_

#include <string_view>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace split {

using SparseMatrix = Eigen::SparseMatrix<double>;

// minimize 1/2 x^T P x + q^T x  s.t.  A x = b,  G x <= h.
// P must be symmetric (both triangles stored) and positive semidefinite.
struct QpProblem {
  SparseMatrix hessian;
  Eigen::VectorXd gradient;
  SparseMatrix eq_matrix;
  Eigen::VectorXd eq_rhs;
  SparseMatrix ineq_matrix;
  Eigen::VectorXd ineq_rhs;

  Eigen::Index num_variables() const { return gradient.size(); }
};

enum class QpStatus { kSolved, kMaxIter, kInfeasible, kNumericalError };

std::string_view QpStatusName(QpStatus status);

struct QpSettings {
  int max_iterations = 60;
  double tolerance = 1e-9;
  // Diagonal regularization of the Newton system; removed again by
  // iterative refinement.
  double regularization = 1e-9;
  int refinement_steps = 3;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd eq_dual;
  Eigen::VectorXd ineq_dual;
  Eigen::VectorXd slack;  // h - G x
  QpStatus status = QpStatus::kNumericalError;
  int iterations = 0;
  double kkt_residual = 0.0;
};

// Scaled KKT residual: max of relative stationarity, equality and inequality
// infeasibility, and mean complementarity.
double KktResidual(const QpProblem& problem, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& eq_dual,
                   const Eigen::VectorXd& ineq_dual);

// Primal-dual interior point (Mehrotra predictor-corrector) on the sparse
// quasi-definite Newton system. Deterministic for fixed inputs.
QpSolution SolveQp(const QpProblem& problem, const QpSettings& settings = {});

}  // namespace split

#endif  // SPLIT_QP_H_
