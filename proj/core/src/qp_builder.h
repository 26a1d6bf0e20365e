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

#ifndef SPLIT_QP_BUILDER_H_
#define SPLIT_QP_BUILDER_H_

#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "split/qp.h"

namespace split::internal {

using Term = std::pair<int, double>;

// Accumulates a sparse QP row by row.
class QpBuilder {
 public:
  explicit QpBuilder(int num_variables)
      : n_(num_variables), gradient_(Eigen::VectorXd::Zero(num_variables)) {}

  int num_variables() const { return n_; }

  // weight * x_i * x_j added to the objective (both triangles kept).
  void AddProduct(int i, int j, double weight) {
    if (i == j) {
      hessian_.emplace_back(i, i, 2.0 * weight);
    } else {
      hessian_.emplace_back(i, j, weight);
      hessian_.emplace_back(j, i, weight);
    }
  }
  void AddLinear(int i, double weight) { gradient_[i] += weight; }

  // weight * (x_i - target)^2
  void AddSquare(int i, double target, double weight) {
    AddProduct(i, i, weight);
    AddLinear(i, -2.0 * weight * target);
  }

  // weight * (sum_t a_t x_t + offset)^2
  template <typename Terms>
  void AddSquaredAffine(const Terms& terms, double offset, double weight) {
    for (const auto& [i, ai] : terms) {
      for (const auto& [j, aj] : terms) {
        hessian_.emplace_back(i, j, 2.0 * weight * ai * aj);
      }
      gradient_[i] += 2.0 * weight * offset * ai;
    }
  }
  void AddSquaredAffine(std::initializer_list<Term> terms, double offset,
                        double weight) {
    AddSquaredAffine<std::initializer_list<Term>>(terms, offset, weight);
  }

  // sum_t a_t x_t == rhs
  template <typename Terms>
  void AddEquality(const Terms& terms, double rhs) {
    for (const auto& [i, a] : terms) eq_.emplace_back(eq_rhs_.size(), i, a);
    eq_rhs_.push_back(rhs);
  }
  void AddEquality(std::initializer_list<Term> terms, double rhs) {
    AddEquality<std::initializer_list<Term>>(terms, rhs);
  }

  // sum_t a_t x_t <= rhs
  template <typename Terms>
  void AddInequality(const Terms& terms, double rhs) {
    for (const auto& [i, a] : terms) in_.emplace_back(in_rhs_.size(), i, a);
    in_rhs_.push_back(rhs);
  }
  void AddInequality(std::initializer_list<Term> terms, double rhs) {
    AddInequality<std::initializer_list<Term>>(terms, rhs);
  }

  void AddBounds(int i, double lo, double hi) {
    AddInequality({{i, 1.0}}, hi);
    AddInequality({{i, -1.0}}, -lo);
  }

  QpProblem Build() const {
    QpProblem qp;
    qp.hessian.resize(n_, n_);
    qp.hessian.setFromTriplets(hessian_.begin(), hessian_.end());
    qp.gradient = gradient_;
    qp.eq_matrix.resize(static_cast<int>(eq_rhs_.size()), n_);
    qp.eq_matrix.setFromTriplets(eq_.begin(), eq_.end());
    qp.eq_rhs = Eigen::Map<const Eigen::VectorXd>(
        eq_rhs_.data(), static_cast<Eigen::Index>(eq_rhs_.size()));
    qp.ineq_matrix.resize(static_cast<int>(in_rhs_.size()), n_);
    qp.ineq_matrix.setFromTriplets(in_.begin(), in_.end());
    qp.ineq_rhs = Eigen::Map<const Eigen::VectorXd>(
        in_rhs_.data(), static_cast<Eigen::Index>(in_rhs_.size()));
    return qp;
  }

 private:
  using Triplet = Eigen::Triplet<double>;

  int n_;
  Eigen::VectorXd gradient_;
  std::vector<Triplet> hessian_;
  std::vector<Triplet> eq_;
  std::vector<double> eq_rhs_;
  std::vector<Triplet> in_;
  std::vector<double> in_rhs_;
};

}  // namespace split::internal

#endif  // SPLIT_QP_BUILDER_H_
