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
#include <string>
#include <vector>

namespace split {
namespace {

// Expert variances at exactly zero would make the precision infinite.
constexpr double kVarianceFloor = 1e-300;

}  // namespace

BcmResult AggregateCommittee(std::span<const Prediction> members,
                             const Eigen::Vector3d& prior_variance,
                             bool clamp_negative_precision) {
  BcmResult out;
  out.members = static_cast<int>(members.size());
  if (members.empty()) {
    out.prediction.variance = prior_variance;
    return out;
  }
  Eigen::Vector3d precision =
      -(static_cast<double>(members.size()) - 1.0) *
      prior_variance.cwiseInverse();
  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  for (const Prediction& m : members) {
    const Eigen::Vector3d inv =
        m.variance.cwiseMax(kVarianceFloor).cwiseInverse();
    precision += inv;
    weighted += inv.cwiseProduct(m.mean);
  }
  for (int d = 0; d < 3; ++d) {
    if (!(precision[d] > 0.0)) {
      if (!clamp_negative_precision) {
        throw NumericalError("committee precision non-positive for output " +
                             std::to_string(d));
      }
      precision[d] = 1e-8 / prior_variance[d];
      out.clamped_outputs |= 1u << d;
    }
    out.prediction.variance[d] = 1.0 / precision[d];
    out.prediction.mean[d] = out.prediction.variance[d] * weighted[d];
  }
  return out;
}

BcmResult BcmPredict(const StoreSnapshot& snapshot, const Feature& query,
                     const Hyperparams& hyp, const RegionSpec& region,
                     const BcmConfig& config) {
  std::vector<Prediction> members;
  members.reserve(snapshot.size());
  const CellIndex home = CellCoordinates(query, region);
  for (const auto& [cell, dict] : snapshot) {
    if (dict->empty()) continue;
    if (config.neighborhood_radius &&
        CellDistance(cell, home) > *config.neighborhood_radius) {
      continue;
    }
    members.push_back(dict->Predict(query));
  }
  return AggregateCommittee(members, hyp.signal_variance,
                            config.clamp_negative_precision);
}

Prediction FullGpPredict(const StoreSnapshot& snapshot, const Feature& query,
                         const Hyperparams& hyp, std::size_t cap) {
  const std::size_t total = TotalSamples(snapshot);
  if (total > cap) {
    throw CapExceeded("full GP over " + std::to_string(total) +
                      " samples exceeds cap " + std::to_string(cap));
  }
  std::vector<LabeledSample> all;
  all.reserve(total);
  for (const auto& [cell, dict] : snapshot) {
    all.insert(all.end(), dict->samples().begin(), dict->samples().end());
  }
  return Posterior(std::span<const LabeledSample>(all), query, hyp);
}

}  // namespace split
