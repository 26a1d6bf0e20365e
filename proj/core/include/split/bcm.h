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

#ifndef SPLIT_BCM_H_
#define SPLIT_BCM_H_

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "split/gp.h"
#include "split/learner.h"
#include "split/region.h"

namespace split {

struct BcmConfig {
  // Only cells within this Chebyshev lattice distance of the query take part.
  // Unset: every non-empty cell.
  std::optional<int> neighborhood_radius;
  // Clamp a non-positive aggregated precision to 1e-8 / prior instead of
  // throwing.
  bool clamp_negative_precision = false;
};

struct BcmResult {
  Prediction prediction;
  int members = 0;
  // Bit d set when output d's precision was clamped.
  unsigned clamped_outputs = 0;
};

// Precision-weighted combination of independent expert posteriors under a
// zero-mean prior with variance `prior_variance`:
//   P = -(n - 1) / S0 + sum_i 1 / S_i,  mean = (1 / P) sum_i mu_i / S_i.
// No members returns the prior.
BcmResult AggregateCommittee(std::span<const Prediction> members,
                             const Eigen::Vector3d& prior_variance,
                             bool clamp_negative_precision);

// Committee prediction over the dictionaries in `snapshot`.
BcmResult BcmPredict(const StoreSnapshot& snapshot, const Feature& query,
                     const Hyperparams& hyp, const RegionSpec& region,
                     const BcmConfig& config = {});

// Exact GP over the union of every dictionary, rebuilt per call. Throws
// CapExceeded above `cap` samples.
Prediction FullGpPredict(const StoreSnapshot& snapshot, const Feature& query,
                         const Hyperparams& hyp, std::size_t cap = 3000);

}  // namespace split

#endif  // SPLIT_BCM_H_
