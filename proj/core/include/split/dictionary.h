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

#ifndef SPLIT_DICTIONARY_H_
#define SPLIT_DICTIONARY_H_

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include "split/errors.h"
#include "split/gp.h"

namespace split {

// How the per-sample marginal gains are maintained.
enum class GainMode {
  // Each sample keeps its leave-one-out kernel matrix and kernel vector,
  // grown or patched in place on every mutation and solved directly.
  kLeaveOneOutCaches,
  // Gains read off the diagonal of the full inverse, gamma_i =
  // 1 / [K^-1]_ii - jitter. One O(n^3) inversion per mutation; used for the
  // undivided baseline set.
  kInverseDiagonal,
};

// A bounded data subset with cached kernel matrix, per-output Cholesky
// factors, and the marginal gain of every sample with respect to the rest.
//
// The gain kernel uses the largest per-output signal variance; the diagonal
// of `kernel_matrix()` carries jitter_ratio * that variance.
template <int Dim>
class LocalDictionaryT {
 public:
  using FeatureType = FeatureT<Dim>;
  using Sample = LabeledSampleT<Dim>;

  LocalDictionaryT(const HyperparamsT<Dim>& hyp, int capacity,
                   GainMode mode = GainMode::kLeaveOneOutCaches)
      : hyp_(hyp), capacity_(capacity), mode_(mode) {
    RefreshFactorizations();
  }

  // Builds every cache from scratch for the given samples (in slot order).
  static LocalDictionaryT FromSamples(const HyperparamsT<Dim>& hyp,
                                      int capacity, GainMode mode,
                                      std::vector<Sample> samples,
                                      std::vector<std::uint64_t> sequence) {
    assert(samples.size() == sequence.size());
    assert(static_cast<int>(samples.size()) <= capacity);
    LocalDictionaryT dict(hyp, capacity, mode);
    dict.samples_ = std::move(samples);
    dict.sequence_ = std::move(sequence);
    const Eigen::Index n = dict.size();
    dict.kernel_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      dict.kernel_(i, i) = dict.DiagonalEntry();
      for (Eigen::Index j = 0; j < i; ++j) {
        dict.kernel_(i, j) = dict.kernel_(j, i) =
            dict.GainKernel(dict.samples_[i].z, dict.samples_[j].z);
      }
    }
    if (mode == GainMode::kLeaveOneOutCaches) {
      dict.loo_kernel_.resize(n);
      dict.loo_vector_.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        dict.loo_kernel_[i] = WithoutRowCol(dict.kernel_, i);
        dict.loo_vector_[i] = WithoutEntry(dict.kernel_.col(i), i);
      }
    }
    dict.RecomputeGains();
    dict.RefreshFactorizations();
    return dict;
  }

  int size() const { return static_cast<int>(samples_.size()); }
  int capacity() const { return capacity_; }
  bool empty() const { return samples_.empty(); }
  bool full() const { return size() >= capacity_; }
  GainMode mode() const { return mode_; }
  const HyperparamsT<Dim>& hyperparams() const { return hyp_; }

  const std::vector<Sample>& samples() const { return samples_; }
  const std::vector<std::uint64_t>& sequence() const { return sequence_; }
  const Eigen::MatrixXd& kernel_matrix() const { return kernel_; }
  const Eigen::VectorXd& gains() const { return gains_; }
  const std::vector<Eigen::MatrixXd>& loo_kernels() const { return loo_kernel_; }
  const std::vector<Eigen::VectorXd>& loo_vectors() const { return loo_vector_; }
  // Lower Cholesky factor of K_d + s_d^2 I for output d.
  Eigen::MatrixXd CholeskyFactor(int output) const {
    return output_factor_[output].matrixL();
  }
  const Eigen::VectorXd& Weights(int output) const { return weights_[output]; }

  double SignalVariance() const { return hyp_.GainVariance(); }
  double Jitter() const { return hyp_.jitter_ratio * SignalVariance(); }

  // gamma = k(z, z) - k^T K^-1 k against the current contents.
  double MarginalGain(const FeatureType& z) const {
    const double prior = SignalVariance();
    if (samples_.empty()) return prior;
    const Eigen::VectorXd k = KernelColumn(z);
    return prior - k.dot(gain_factor_.solve(k));
  }

  // Slot to evict: lowest gain, oldest sample among ties.
  int EvictionIndex() const {
    assert(!samples_.empty());
    const double tol = 1e-12 * SignalVariance();
    const double lowest = gains_.minCoeff();
    int best = -1;
    for (int i = 0; i < size(); ++i) {
      if (gains_[i] <= lowest + tol &&
          (best < 0 || sequence_[i] < sequence_[best])) {
        best = i;
      }
    }
    return best;
  }

  // Grows the set by one sample. Throws NumericalError on a failed
  // factorization; the object is then unusable and should be discarded.
  void Append(const Sample& sample, std::uint64_t seq) {
    assert(!full());
    const Eigen::Index n = size();
    const Eigen::VectorXd k = KernelColumn(sample.z);
    if (mode_ == GainMode::kLeaveOneOutCaches) {
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::MatrixXd& km = loo_kernel_[i];
        const Eigen::VectorXd k_rest = WithoutEntry(k, i);
        const Eigen::Index m = km.rows();
        km.conservativeResize(m + 1, m + 1);
        km.col(m).head(m) = k_rest;
        km.row(m).head(m) = k_rest.transpose();
        km(m, m) = DiagonalEntry();
        Eigen::VectorXd& kv = loo_vector_[i];
        kv.conservativeResize(m + 1);
        kv[m] = k[i];
      }
      loo_kernel_.push_back(kernel_);
      loo_vector_.push_back(k);
    }
    kernel_.conservativeResize(n + 1, n + 1);
    kernel_.col(n).head(n) = k;
    kernel_.row(n).head(n) = k.transpose();
    kernel_(n, n) = DiagonalEntry();
    samples_.push_back(sample);
    sequence_.push_back(seq);
    RecomputeGains();
    RefreshFactorizations();
  }

  // Overwrites slot `slot` with a new sample, patching row/column `slot`.
  void Replace(int slot, const Sample& sample, std::uint64_t seq) {
    assert(slot >= 0 && slot < size());
    const Eigen::Index n = size();
    Eigen::VectorXd k = KernelColumn(sample.z);
    k[slot] = DiagonalEntry();
    if (mode_ == GainMode::kLeaveOneOutCaches) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == slot) continue;
        const Eigen::Index p = slot < i ? slot : slot - 1;
        Eigen::VectorXd column = WithoutEntry(k, i);
        loo_kernel_[i].col(p) = column;
        loo_kernel_[i].row(p) = column.transpose();
        loo_vector_[i][p] = k[i];
      }
    }
    kernel_.col(slot) = k;
    kernel_.row(slot) = k.transpose();
    if (mode_ == GainMode::kLeaveOneOutCaches) {
      loo_kernel_[slot] = WithoutRowCol(kernel_, slot);
      loo_vector_[slot] = WithoutEntry(kernel_.col(slot), slot);
    }
    samples_[slot] = sample;
    sequence_[slot] = seq;
    RecomputeGains();
    RefreshFactorizations();
  }

  // Posterior from the cached factorizations.
  Prediction Predict(const FeatureType& z) const {
    Prediction out;
    if (samples_.empty()) {
      out.variance = hyp_.signal_variance;
      return out;
    }
    Eigen::VectorXd corr(size());
    for (int i = 0; i < size(); ++i) {
      corr[i] = hyp_.Correlation(samples_[i].z, z);
    }
    Eigen::VectorXd v(size());
    for (int d = 0; d < 3; ++d) {
      const double sf2 = hyp_.signal_variance[d];
      out.mean[d] = sf2 * corr.dot(weights_[d]);
      v = sf2 * corr;
      output_factor_[d].matrixL().solveInPlace(v);
      out.variance[d] = std::max(0.0, sf2 - v.squaredNorm());
    }
    return out;
  }

  // Largest absolute difference between the cached state and a rebuild from
  // the stored samples.
  double ScratchDeviation() const {
    const LocalDictionaryT fresh =
        FromSamples(hyp_, capacity_, mode_, samples_, sequence_);
    double dev = 0.0;
    auto track = [&dev](const auto& a, const auto& b) {
      if (a.rows() != b.rows() || a.cols() != b.cols()) {
        dev = std::numeric_limits<double>::infinity();
        return;
      }
      if (a.size() > 0) dev = std::max(dev, (a - b).cwiseAbs().maxCoeff());
    };
    track(kernel_, fresh.kernel_);
    track(gains_, fresh.gains_);
    if (loo_kernel_.size() != fresh.loo_kernel_.size()) {
      return std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < loo_kernel_.size(); ++i) {
      track(loo_kernel_[i], fresh.loo_kernel_[i]);
      track(loo_vector_[i], fresh.loo_vector_[i]);
    }
    for (int d = 0; d < 3; ++d) {
      if (!samples_.empty()) {
        track(CholeskyFactor(d), fresh.CholeskyFactor(d));
      }
      track(weights_[d], fresh.weights_[d]);
    }
    return dev;
  }

  // Test hook: perturbs one cached kernel entry without touching the samples.
  void CorruptCacheForTesting(double delta) {
    if (samples_.empty()) return;
    if (mode_ == GainMode::kLeaveOneOutCaches && size() > 1) {
      loo_kernel_[0](0, 0) += delta;
      RecomputeGains();
    } else {
      gains_[0] += delta;
    }
  }

 private:
  double DiagonalEntry() const { return SignalVariance() + Jitter(); }

  double GainKernel(const FeatureType& a, const FeatureType& b) const {
    return SignalVariance() * hyp_.Correlation(a, b);
  }

  Eigen::VectorXd KernelColumn(const FeatureType& z) const {
    Eigen::VectorXd k(size());
    for (int i = 0; i < size(); ++i) k[i] = GainKernel(samples_[i].z, z);
    return k;
  }

  static Eigen::VectorXd WithoutEntry(const Eigen::VectorXd& v,
                                      Eigen::Index drop) {
    const Eigen::Index n = v.size();
    Eigen::VectorXd out(n - 1);
    out.head(drop) = v.head(drop);
    out.tail(n - 1 - drop) = v.tail(n - 1 - drop);
    return out;
  }

  static Eigen::MatrixXd WithoutRowCol(const Eigen::MatrixXd& m,
                                       Eigen::Index drop) {
    const Eigen::Index n = m.rows();
    const Eigen::Index tail = n - 1 - drop;
    Eigen::MatrixXd out(n - 1, n - 1);
    out.topLeftCorner(drop, drop) = m.topLeftCorner(drop, drop);
    out.topRightCorner(drop, tail) = m.topRightCorner(drop, tail);
    out.bottomLeftCorner(tail, drop) = m.bottomLeftCorner(tail, drop);
    out.bottomRightCorner(tail, tail) = m.bottomRightCorner(tail, tail);
    return out;
  }

  void RecomputeGains() {
    const Eigen::Index n = size();
    const double prior = SignalVariance();
    gains_.resize(n);
    if (n == 1) {
      gains_[0] = prior;
      return;
    }
    if (mode_ == GainMode::kLeaveOneOutCaches) {
      Eigen::LLT<Eigen::MatrixXd> llt;
      for (Eigen::Index i = 0; i < n; ++i) {
        llt.compute(loo_kernel_[i]);
        if (llt.info() != Eigen::Success) {
          throw NumericalError("marginal gain: leave-one-out factorization failed");
        }
        gains_[i] = prior - loo_vector_[i].dot(llt.solve(loo_vector_[i]));
      }
    } else if (n > 0) {
      Eigen::LLT<Eigen::MatrixXd> llt(kernel_);
      if (llt.info() != Eigen::Success) {
        throw NumericalError("marginal gain: kernel factorization failed");
      }
      const Eigen::MatrixXd inverse =
          llt.solve(Eigen::MatrixXd::Identity(n, n));
      gains_ = inverse.diagonal().cwiseInverse().array() - Jitter();
    }
  }

  void RefreshFactorizations() {
    const Eigen::Index n = size();
    gain_factor_.compute(kernel_);
    if (n > 0 && gain_factor_.info() != Eigen::Success) {
      throw NumericalError("kernel matrix factorization failed");
    }
    Eigen::MatrixXd labels(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      labels.row(i) = samples_[i].y.transpose();
    }
    for (int d = 0; d < 3; ++d) {
      // K_d = (s_d / s_g) (K_gain - jitter_g I) + (jitter_d + noise_d) I.
      const double ratio = hyp_.signal_variance[d] / SignalVariance();
      Eigen::MatrixXd kd = ratio * kernel_;
      kd.diagonal().array() += hyp_.noise_variance[d];
      output_factor_[d].compute(kd);
      if (n > 0 && output_factor_[d].info() != Eigen::Success) {
        throw NumericalError("per-output factorization failed");
      }
      weights_[d] = n > 0 ? Eigen::VectorXd(output_factor_[d].solve(labels.col(d)))
                          : Eigen::VectorXd();
    }
  }

  HyperparamsT<Dim> hyp_;
  int capacity_;
  GainMode mode_;
  std::vector<Sample> samples_;
  std::vector<std::uint64_t> sequence_;
  Eigen::MatrixXd kernel_;
  std::vector<Eigen::MatrixXd> loo_kernel_;
  std::vector<Eigen::VectorXd> loo_vector_;
  Eigen::VectorXd gains_;
  Eigen::LLT<Eigen::MatrixXd> gain_factor_;
  std::array<Eigen::LLT<Eigen::MatrixXd>, 3> output_factor_;
  std::array<Eigen::VectorXd, 3> weights_;
};

using LocalDictionary = LocalDictionaryT<3>;

}  // namespace split

#endif  // SPLIT_DICTIONARY_H_
