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

#ifndef SPLIT_TESTS_ORACLES_ACTIVE_SET_QP_H_
#define SPLIT_TESTS_ORACLES_ACTIVE_SET_QP_H_

#include <limits>
#include <optional>

#include <Eigen/Dense>

namespace split::oracle {

// min 1/2 x'Px + q'x  s.t.  Ax = b, Gx <= h, with P positive definite.
// Tries every subset of inequalities as the active set and keeps the one
// whose KKT point is primal and dual feasible. Exponential; small m only.
inline std::optional<Eigen::VectorXd> EnumerateActiveSets(
    const Eigen::MatrixXd& p, const Eigen::VectorXd& q, const Eigen::MatrixXd& a,
    const Eigen::VectorXd& b, const Eigen::MatrixXd& g,
    const Eigen::VectorXd& h, double tol = 1e-9) {
  const int n = static_cast<int>(q.size());
  const int me = static_cast<int>(a.rows());
  const int mi = static_cast<int>(g.rows());
  std::optional<Eigen::VectorXd> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << mi); ++mask) {
    int active = 0;
    for (int i = 0; i < mi; ++i) active += (mask >> i) & 1u;
    const int m = me + active;
    if (m > n) continue;
    Eigen::MatrixXd c(m, n);
    Eigen::VectorXd d(m);
    c.topRows(me) = a;
    d.head(me) = b;
    int row = me;
    for (int i = 0; i < mi; ++i) {
      if ((mask >> i) & 1u) {
        c.row(row) = g.row(i);
        d[row++] = h[i];
      }
    }
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = p;
    kkt.topRightCorner(n, m) = c.transpose();
    kkt.bottomLeftCorner(m, n) = c;
    Eigen::VectorXd rhs(n + m);
    rhs << -q, d;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (lu.rank() < n + m) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    const Eigen::VectorXd lambda = sol.tail(m);
    if (mi > 0 && ((g * x - h).array() > tol).any()) continue;
    if (active > 0 && (lambda.tail(active).array() < -tol).any()) continue;
    const double cost = 0.5 * x.dot(p * x) + q.dot(x);
    if (cost < best_cost) {
      best_cost = cost;
      best = x;
    }
  }
  return best;
}

}  // namespace split::oracle

#endif  // SPLIT_TESTS_ORACLES_ACTIVE_SET_QP_H_
