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

#ifndef SPLIT_GP_H_
#define SPLIT_GP_H_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "split/errors.h"

namespace split {

template <int Dim>
using FeatureT = Eigen::Matrix<double, Dim, 1>;

// (alpha_f rad, alpha_r rad, T / T_max).
using Feature = FeatureT<3>;

// Squared-exponential kernel hyperparameters. The length scales are shared by
// the three outputs; signal and noise variances are per output.
template <int Dim>
struct HyperparamsT {
  FeatureT<Dim> length_scales = FeatureT<Dim>::Ones();
  Eigen::Vector3d signal_variance = Eigen::Vector3d::Constant(0.05);
  Eigen::Vector3d noise_variance{1e-4, 1e-4, 2.5e-5};
  // Diagonal jitter, relative to the signal variance.
  double jitter_ratio = 1e-9;

  // exp(-1/2 (a-b)^T M (a-b)) with M = diag(1 / l^2).
  double Correlation(const FeatureT<Dim>& a, const FeatureT<Dim>& b) const {
    const double d2 =
        ((a - b).array() / length_scales.array()).matrix().squaredNorm();
    return std::exp(-0.5 * d2);
  }

  // Signal variance of the kernel used for marginal gains.
  double GainVariance() const { return signal_variance.maxCoeff(); }

  void Validate() const {
    if (!(length_scales.array() > 0.0).all() ||
        !length_scales.allFinite()) {
      throw ConfigError("hyperparameters.length_scales must be positive");
    }
    if (!(signal_variance.array() > 0.0).all()) {
      throw ConfigError("hyperparameters.signal_variance must be positive");
    }
    if (!(noise_variance.array() > 0.0).all()) {
      throw ConfigError("hyperparameters.noise_variance must be positive");
    }
    if (!(jitter_ratio >= 0.0)) {
      throw ConfigError("hyperparameters.jitter_ratio must be non-negative");
    }
  }
};

using Hyperparams = HyperparamsT<3>;

// Length scales (0.04, 0.04, 0.2), signal variance 0.05, noise
// (1e-4, 1e-4, 2.5e-5).
inline Hyperparams DefaultHyperparams() {
  Hyperparams hyp;
  hyp.length_scales = {0.04, 0.04, 0.2};
  return hyp;
}

template <int Dim>
struct LabeledSampleT {
  FeatureT<Dim> z;
  Eigen::Vector3d y;  // (dv_x m/s, dv_y m/s, dr rad/s)
};

using LabeledSample = LabeledSampleT<3>;

// Independent per-output Gaussian: mean and (diagonal) variance.
struct Prediction {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d variance = Eigen::Vector3d::Zero();
};

// sigma_f^2 exp(-1/2 (a-b)^T diag(1/l^2) (a-b)).
template <int Dim>
double SquaredExponential(const FeatureT<Dim>& a, const FeatureT<Dim>& b,
                          const FeatureT<Dim>& length_scales,
                          double signal_variance) {
  const double d2 = ((a - b).array() / length_scales.array()).matrix().squaredNorm();
  return signal_variance * std::exp(-0.5 * d2);
}

// Kernel for one output.
template <int Dim>
double Kernel(const FeatureT<Dim>& a, const FeatureT<Dim>& b,
              const HyperparamsT<Dim>& hyp, int output = 0) {
  return hyp.signal_variance[output] * hyp.Correlation(a, b);
}

// Exact GP posterior computed from scratch: per output d,
//   mu_d = k*^T (K + (jitter + s_d^2) I)^-1 Y_d
//   var_d = k(z*, z*) - k*^T (K + (jitter + s_d^2) I)^-1 k*.
// An empty sample set returns the prior. Throws NumericalError if a
// factorization fails.
template <int Dim>
Prediction Posterior(std::span<const LabeledSampleT<Dim>> samples,
                     const FeatureT<Dim>& query, const HyperparamsT<Dim>& hyp) {
  Prediction out;
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  if (n == 0) {
    out.variance = hyp.signal_variance;
    return out;
  }
  Eigen::MatrixXd corr(n, n);
  Eigen::VectorXd k_star(n);
  Eigen::MatrixXd labels(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    corr(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      corr(i, j) = corr(j, i) = hyp.Correlation(samples[i].z, samples[j].z);
    }
    k_star[i] = hyp.Correlation(samples[i].z, query);
    labels.row(i) = samples[i].y.transpose();
  }
  for (int d = 0; d < 3; ++d) {
    const double sf2 = hyp.signal_variance[d];
    Eigen::MatrixXd k = sf2 * corr;
    k.diagonal().array() += hyp.jitter_ratio * sf2 + hyp.noise_variance[d];
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("GP posterior: Cholesky factorization failed");
    }
    const Eigen::VectorXd ks = sf2 * k_star;
    out.mean[d] = ks.dot(llt.solve(labels.col(d)));
    const Eigen::VectorXd v = llt.matrixL().solve(ks);
    out.variance[d] = std::max(0.0, sf2 - v.squaredNorm());
  }
  return out;
}

template <int Dim>
Prediction Posterior(const std::vector<LabeledSampleT<Dim>>& samples,
                     const FeatureT<Dim>& query, const HyperparamsT<Dim>& hyp) {
  return Posterior(std::span<const LabeledSampleT<Dim>>(samples), query, hyp);
}

// Log marginal likelihood of the labels, summed over the three outputs.
// Throws NumericalError if a factorization fails.
template <int Dim>
double LogMarginalLikelihood(std::span<const LabeledSampleT<Dim>> samples,
                             const HyperparamsT<Dim>& hyp) {
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd corr(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    corr(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      corr(i, j) = corr(j, i) = hyp.Correlation(samples[i].z, samples[j].z);
    }
  }
  double total = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double sf2 = hyp.signal_variance[d];
    Eigen::MatrixXd k = sf2 * corr;
    k.diagonal().array() += hyp.jitter_ratio * sf2 + hyp.noise_variance[d];
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("GP likelihood: Cholesky factorization failed");
    }
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = samples[i].y[d];
    const Eigen::VectorXd a = llt.matrixL().solve(y);
    const double log_det =
        2.0 * llt.matrixLLT().diagonal().array().log().sum();
    total += -0.5 * a.squaredNorm() - 0.5 * log_det -
             0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  }
  return total;
}

}  // namespace split

#endif  // SPLIT_GP_H_
