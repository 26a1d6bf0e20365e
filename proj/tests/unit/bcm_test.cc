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

#include "split/bcm.h"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "dense_gp.h"
#include "split/config.h"
#include "split/errors.h"

namespace split {
namespace {

class BcmTest : public ::testing::Test {
 protected:
  BcmTest() : config_(DefaultScenarioConfig()) {}

  std::shared_ptr<const LocalDictionary> Dict(const Feature& center, int n,
                                              double spread) {
    std::normal_distribution<double> d(0, spread), y(0, 0.1);
    std::vector<LabeledSample> samples;
    std::vector<std::uint64_t> seq;
    for (int i = 0; i < n; ++i) {
      samples.push_back({center + Feature(d(rng_), d(rng_), 4 * d(rng_)),
                         Eigen::Vector3d(y(rng_), y(rng_), y(rng_))});
      seq.push_back(i);
    }
    return std::make_shared<const LocalDictionary>(LocalDictionary::FromSamples(
        config_.hyperparameters, 10, GainMode::kLeaveOneOutCaches,
        std::move(samples), std::move(seq)));
  }

  Feature Query() {
    std::uniform_real_distribution<double> a(-0.1, 0.1), t(-0.5, 0.5);
    return {a(rng_), a(rng_), t(rng_)};
  }

  ScenarioConfig config_;
  std::mt19937_64 rng_{23};
};

TEST_F(BcmTest, EmptyStoreReturnsPrior) {
  const BcmResult r = BcmPredict({}, Query(), config_.hyperparameters,
                                 config_.region);
  EXPECT_TRUE(r.prediction.mean.isZero(0.0));
  EXPECT_EQ(r.prediction.variance, config_.hyperparameters.signal_variance);
}

TEST_F(BcmTest, SingleMemberReducesToLocalPosterior) {
  const auto dict = Dict(Feature(0.01, -0.01, 0.1), 8, 0.02);
  const StoreSnapshot snap = {{CellIndex{0, -1, 1}, dict}};
  for (int i = 0; i < 1000; ++i) {
    const Feature q = Query();
    const Prediction a =
        BcmPredict(snap, q, config_.hyperparameters, config_.region).prediction;
    const Prediction b = Posterior(dict->samples(), q, config_.hyperparameters);
    EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((a.variance - b.variance).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST_F(BcmTest, EmptyMemberIsNeutral) {
  std::vector<Prediction> members;
  for (int i = 0; i < 4; ++i) {
    members.push_back(Dict(Query(), 6, 0.02)->Predict(Query()));
  }
  const Eigen::Vector3d prior = config_.hyperparameters.signal_variance;
  const BcmResult base = AggregateCommittee(members, prior, true);
  Prediction empty;
  empty.variance = prior;
  members.push_back(empty);
  const BcmResult padded = AggregateCommittee(members, prior, true);
  EXPECT_LT((base.prediction.mean - padded.prediction.mean).cwiseAbs().maxCoeff(),
            1e-12);
  EXPECT_LT((base.prediction.variance - padded.prediction.variance)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST_F(BcmTest, DistantCellsAgreeWithLocalAndFullGp) {
  const double sf = std::sqrt(config_.hyperparameters.signal_variance[0]);
  const auto near = Dict(Feature(0.01, 0.01, 0.05), 10, 0.005);
  // More than 6 length scales away along the torque axis.
  const auto far = Dict(Feature(0.01, 0.01, 0.05 + 1.5), 10, 0.005);
  const StoreSnapshot snap = {{CellIndex{0, 0, 0}, near},
                              {CellIndex{0, 0, 15}, far}};
  const Feature q(0.012, 0.011, 0.06);
  const Prediction bcm =
      BcmPredict(snap, q, config_.hyperparameters, config_.region).prediction;
  const Prediction local = near->Predict(q);
  const Prediction full = FullGpPredict(snap, q, config_.hyperparameters);
  for (int d = 0; d < 3; ++d) {
    EXPECT_LT(std::abs(bcm.mean[d] - local.mean[d]), 1e-3 * sf);
    EXPECT_LT(std::abs(bcm.mean[d] - full.mean[d]), 0.05 * sf);
  }
}

TEST_F(BcmTest, FullGpEqualsPosteriorForOneDictionary) {
  const auto dict = Dict(Feature(0, 0, 0), 10, 0.02);
  const StoreSnapshot snap = {{CellIndex{0, 0, 0}, dict}};
  const Feature q = Query();
  const Prediction a = FullGpPredict(snap, q, config_.hyperparameters);
  const Prediction b = Posterior(dict->samples(), q, config_.hyperparameters);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
}

TEST_F(BcmTest, FullGpMatchesDenseOracle) {
  const StoreSnapshot snap = {{CellIndex{0, 0, 0}, Dict(Feature(0, 0, 0), 10, 0.02)},
                              {CellIndex{1, 0, 0}, Dict(Feature(0.03, 0, 0), 10, 0.02)},
                              {CellIndex{0, 1, 0}, Dict(Feature(0, 0.03, 0), 10, 0.02)}};
  Eigen::MatrixXd z(30, 3), y(30, 3);
  int row = 0;
  for (const auto& [cell, dict] : snap) {
    for (const auto& s : dict->samples()) {
      z.row(row) = s.z.transpose();
      y.row(row++) = s.y.transpose();
    }
  }
  const Hyperparams& h = config_.hyperparameters;
  const oracle::DenseGp o{h.length_scales, h.signal_variance, h.noise_variance,
                          h.jitter_ratio};
  for (int i = 0; i < 20; ++i) {
    const Feature q = Query();
    const Prediction p = FullGpPredict(snap, q, h);
    for (int d = 0; d < 3; ++d) {
      const auto [mu, var] = o.Posterior(z, y, q, d);
      EXPECT_NEAR(p.mean[d], mu, 1e-10);
      EXPECT_NEAR(p.variance[d], var, 1e-10);
    }
  }
}

TEST_F(BcmTest, FullGpCap) {
  const StoreSnapshot snap = {{CellIndex{0, 0, 0}, Dict(Feature(0, 0, 0), 10, 0.02)}};
  EXPECT_THROW(FullGpPredict(snap, Query(), config_.hyperparameters, 5),
               CapExceeded);
}

TEST_F(BcmTest, PrecisionAccountingAndOrder) {
  std::vector<Prediction> members;
  for (int i = 0; i < 6; ++i) {
    members.push_back(Dict(Feature(0.01 * i, 0, 0), 10, 0.01)->Predict(Query()));
  }
  const Eigen::Vector3d prior = config_.hyperparameters.signal_variance;
  const BcmResult r = AggregateCommittee(members, prior, true);
  std::vector<Prediction> shuffled = members;
  std::shuffle(shuffled.begin(), shuffled.end(), rng_);
  const BcmResult s = AggregateCommittee(shuffled, prior, true);
  EXPECT_LT((r.prediction.mean - s.prediction.mean).cwiseAbs().maxCoeff(), 1e-12);
  if (r.clamped_outputs == 0) {
    for (int d = 0; d < 3; ++d) {
      double tightest = 1e9;
      for (const auto& m : members) tightest = std::min(tightest, m.variance[d]);
      EXPECT_LE(r.prediction.variance[d], tightest + 1e-12);
    }
  }
}

TEST_F(BcmTest, NegativePrecisionThrowsOrClamps) {
  const Eigen::Vector3d prior = config_.hyperparameters.signal_variance;
  // Members looser than the prior drive the summed precision negative.
  Prediction loose;
  loose.variance = prior * 1.5;
  loose.mean.setConstant(0.1);
  const std::vector<Prediction> members(4, loose);
  EXPECT_THROW(AggregateCommittee(members, prior, false), NumericalError);
  const BcmResult clamped = AggregateCommittee(members, prior, true);
  EXPECT_EQ(clamped.clamped_outputs, 7u);
  EXPECT_TRUE(clamped.prediction.variance.allFinite());
  EXPECT_TRUE((clamped.prediction.variance.array() > 0).all());
}

TEST_F(BcmTest, NeighborhoodRadiusLimitsMembers) {
  const StoreSnapshot snap = {{CellIndex{0, 0, 0}, Dict(Feature(0.01, 0.01, 0.05), 5, 0.003)},
                              {CellIndex{5, 0, 0}, Dict(Feature(0.11, 0.01, 0.05), 5, 0.003)}};
  BcmConfig cfg;
  cfg.neighborhood_radius = 2;
  const BcmResult r = BcmPredict(snap, Feature(0.01, 0.01, 0.05),
                                 config_.hyperparameters, config_.region, cfg);
  EXPECT_EQ(r.members, 1);
  const BcmResult all = BcmPredict(snap, Feature(0.01, 0.01, 0.05),
                                   config_.hyperparameters, config_.region);
  EXPECT_EQ(all.members, 2);
}

}  // namespace
}  // namespace split
