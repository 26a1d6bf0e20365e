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

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>

namespace split {
namespace {

double InfNorm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Reduced Newton system
//   [P + G^T W G + d I   A^T ] [dx]   [rx]
//   [A                  -d I ] [dy] = [ry]
// factored once per iteration, refined against d = 0.
class NewtonSystem {
 public:
  explicit NewtonSystem(const QpProblem& qp, double delta)
      : qp_(qp), delta_(delta) {}

  bool Factor(const Eigen::VectorXd& w) {
    const Eigen::Index n = qp_.num_variables();
    const Eigen::Index p = qp_.eq_matrix.rows();
    SparseMatrix upper = qp_.hessian;
    if (qp_.ineq_matrix.rows() > 0) {
      SparseMatrix weighted = w.asDiagonal() * qp_.ineq_matrix;
      upper += SparseMatrix(qp_.ineq_matrix.transpose() * weighted);
    }
    reduced_ = upper;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(upper.nonZeros() + 2 * qp_.eq_matrix.nonZeros() + n + p);
    for (int k = 0; k < upper.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(upper, k); it; ++it) {
        triplets.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int k = 0; k < qp_.eq_matrix.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(qp_.eq_matrix, k); it; ++it) {
        triplets.emplace_back(n + it.row(), it.col(), it.value());
        triplets.emplace_back(it.col(), n + it.row(), it.value());
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, delta_);
    for (Eigen::Index i = 0; i < p; ++i) {
      triplets.emplace_back(n + i, n + i, -delta_);
    }
    SparseMatrix kkt(n + p, n + p);
    kkt.setFromTriplets(triplets.begin(), triplets.end());
    ldlt_.compute(kkt);
    return ldlt_.info() == Eigen::Success;
  }

  // Retries with a stronger diagonal shift when a pivot vanishes; the
  // refinement steps take the shift back out.
  bool FactorRobust(const Eigen::VectorXd& w) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (Factor(w)) return true;
      delta_ *= 100.0;
    }
    return false;
  }

  void set_delta(double delta) { delta_ = delta; }

  void Solve(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry,
             Eigen::VectorXd* dx, Eigen::VectorXd* dy, int refinement) const {
    const Eigen::Index n = qp_.num_variables();
    const Eigen::Index p = qp_.eq_matrix.rows();
    Eigen::VectorXd rhs(n + p);
    rhs << rx, ry;
    Eigen::VectorXd sol = ldlt_.solve(rhs);
    for (int it = 0; it < refinement; ++it) {
      Eigen::VectorXd applied(n + p);
      const Eigen::VectorXd sx = sol.head(n);
      const Eigen::VectorXd sy = sol.tail(p);
      applied.head(n) = reduced_ * sx;
      if (p > 0) {
        applied.head(n) += qp_.eq_matrix.transpose() * sy;
        applied.tail(p) = qp_.eq_matrix * sx;
      }
      const Eigen::VectorXd residual = rhs - applied;
      sol += ldlt_.solve(residual);
    }
    *dx = sol.head(n);
    *dy = sol.tail(p);
  }

 private:
  const QpProblem& qp_;
  double delta_;
  SparseMatrix reduced_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
};

double MaxStep(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double step = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) step = std::min(step, -v[i] / dv[i]);
  }
  return step;
}

}  // namespace

std::string_view QpStatusName(QpStatus status) {
  switch (status) {
    case QpStatus::kSolved:
      return "solved";
    case QpStatus::kMaxIter:
      return "max-iter";
    case QpStatus::kInfeasible:
      return "infeasible";
    case QpStatus::kNumericalError:
      return "numerical-error";
  }
  return "unknown";
}

double KktResidual(const QpProblem& qp, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
  Eigen::VectorXd stationarity = qp.hessian * x + qp.gradient;
  if (qp.eq_matrix.rows() > 0) stationarity += qp.eq_matrix.transpose() * y;
  const Eigen::Index m = qp.ineq_matrix.rows();
  if (m > 0) stationarity += qp.ineq_matrix.transpose() * z;
  double res = InfNorm(stationarity) / (1.0 + InfNorm(qp.gradient));
  if (qp.eq_matrix.rows() > 0) {
    res = std::max(res, InfNorm(qp.eq_matrix * x - qp.eq_rhs) /
                            (1.0 + InfNorm(qp.eq_rhs)));
  }
  if (m > 0) {
    const Eigen::VectorXd slack = qp.ineq_rhs - qp.ineq_matrix * x;
    res = std::max(res, slack.cwiseMin(0.0).cwiseAbs().maxCoeff() /
                            (1.0 + InfNorm(qp.ineq_rhs)));
    res = std::max(res, z.cwiseMin(0.0).cwiseAbs().maxCoeff());
    res = std::max(res, std::abs(slack.dot(z)) / static_cast<double>(m));
  }
  return res;
}

QpSolution SolveQp(const QpProblem& qp, const QpSettings& settings) {
  const Eigen::Index n = qp.num_variables();
  const Eigen::Index p = qp.eq_matrix.rows();
  const Eigen::Index m = qp.ineq_matrix.rows();
  const SparseMatrix& g = qp.ineq_matrix;
  const SparseMatrix& a = qp.eq_matrix;

  QpSolution sol;
  NewtonSystem newton(qp, settings.regularization);

  // Start from the minimizer of the problem with unit barrier weights.
  Eigen::VectorXd x(n), y(p), z = Eigen::VectorXd::Ones(m), s(m);
  if (!newton.FactorRobust(Eigen::VectorXd::Ones(m))) {
    sol.status = QpStatus::kNumericalError;
    return sol;
  }
  {
    Eigen::VectorXd rx = -qp.gradient;
    if (m > 0) rx += g.transpose() * qp.ineq_rhs;
    newton.Solve(rx, qp.eq_rhs, &x, &y, settings.refinement_steps);
  }
  if (m > 0) {
    s = qp.ineq_rhs - g * x;
    const double shortfall = -s.minCoeff();
    if (shortfall >= 0.0) s.array() += 1.0 + shortfall;
  }

  const double scale_q = 1.0 + InfNorm(qp.gradient);
  const double scale_b = 1.0 + InfNorm(qp.eq_rhs);
  const double scale_h = 1.0 + InfNorm(qp.ineq_rhs);

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    Eigen::VectorXd r_dual = qp.hessian * x + qp.gradient;
    if (p > 0) r_dual += a.transpose() * y;
    if (m > 0) r_dual += g.transpose() * z;
    const Eigen::VectorXd r_eq =
        p > 0 ? Eigen::VectorXd(a * x - qp.eq_rhs) : Eigen::VectorXd();
    const Eigen::VectorXd r_in =
        m > 0 ? Eigen::VectorXd(g * x + s - qp.ineq_rhs) : Eigen::VectorXd();
    const double mu = m > 0 ? s.dot(z) / static_cast<double>(m) : 0.0;

    const bool converged = InfNorm(r_dual) <= settings.tolerance * scale_q &&
                           InfNorm(r_eq) <= settings.tolerance * scale_b &&
                           InfNorm(r_in) <= settings.tolerance * scale_h &&
                           mu <= settings.tolerance;
    sol.iterations = iter;
    if (converged) {
      sol.status = QpStatus::kSolved;
      break;
    }

    const Eigen::VectorXd w = m > 0 ? Eigen::VectorXd(z.cwiseQuotient(s))
                                    : Eigen::VectorXd();
    sol.status = QpStatus::kMaxIter;
    newton.set_delta(settings.regularization);
    if (!newton.FactorRobust(w)) {
      sol.status = QpStatus::kNumericalError;
      break;
    }

    // Solves for (dx, dy, dz, ds) given the complementarity residual r_c.
    auto direction = [&](const Eigen::VectorXd& r_comp, Eigen::VectorXd* dx,
                         Eigen::VectorXd* dy, Eigen::VectorXd* dz,
                         Eigen::VectorXd* ds) {
      Eigen::VectorXd rx = -r_dual;
      Eigen::VectorXd shift;
      if (m > 0) {
        shift = (z.cwiseProduct(r_in) - r_comp).cwiseQuotient(s);
        rx -= g.transpose() * shift;
      }
      const Eigen::VectorXd ry = p > 0 ? Eigen::VectorXd(-r_eq)
                                       : Eigen::VectorXd();
      newton.Solve(rx, ry, dx, dy, settings.refinement_steps);
      if (m > 0) {
        const Eigen::VectorXd gdx = g * *dx;
        *dz = w.cwiseProduct(gdx) + shift;
        *ds = -r_in - gdx;
      } else {
        dz->resize(0);
        ds->resize(0);
      }
    };

    Eigen::VectorXd dx, dy, dz, ds;
    if (m == 0) {
      direction(Eigen::VectorXd(), &dx, &dy, &dz, &ds);
      x += dx;
      y += dy;
      continue;
    }

    // Predictor.
    const Eigen::VectorXd sz = s.cwiseProduct(z);
    direction(sz, &dx, &dy, &dz, &ds);
    const double step_aff = std::min(MaxStep(s, ds), MaxStep(z, dz));
    const double mu_aff =
        (s + step_aff * ds).dot(z + step_aff * dz) / static_cast<double>(m);
    const double sigma = std::pow(mu_aff / mu, 3);

    // Corrector.
    const Eigen::VectorXd r_comp =
        sz + ds.cwiseProduct(dz) - Eigen::VectorXd::Constant(m, sigma * mu);
    direction(r_comp, &dx, &dy, &dz, &ds);
    const double step =
        std::min(1.0, 0.99 * std::min(MaxStep(s, ds), MaxStep(z, dz)));
    if (!std::isfinite(step) || !dx.allFinite() || !dy.allFinite() ||
        !dz.allFinite() || !ds.allFinite()) {
      sol.status = QpStatus::kNumericalError;
      break;
    }
    x += step * dx;
    if (p > 0) y += step * dy;
    z += step * dz;
    s += step * ds;
  }

  sol.x = x;
  sol.eq_dual = y;
  sol.ineq_dual = z;
  sol.slack = m > 0 ? Eigen::VectorXd(qp.ineq_rhs - g * x) : Eigen::VectorXd();
  sol.kkt_residual = KktResidual(qp, x, y, z);
  return sol;
}

}  // namespace split
