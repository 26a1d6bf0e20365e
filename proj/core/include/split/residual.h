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

#ifndef SPLIT_RESIDUAL_H_
#define SPLIT_RESIDUAL_H_

#include <memory>

#include "split/bcm.h"
#include "split/dictionary.h"
#include "split/gp.h"
#include "split/learner.h"
#include "split/region.h"
#include "split/vehicle.h"

namespace split {

// Learned correction g(z) on the velocity states.
class ResidualModel {
 public:
  virtual ~ResidualModel() = default;
  // Mean and variance of g at the feature of `state`. States below the
  // slip-angle speed guard get the zero prior.
  virtual Prediction Evaluate(const StateVector& state) const = 0;
};

class ZeroResidual final : public ResidualModel {
 public:
  Prediction Evaluate(const StateVector&) const override { return {}; }
};

// Committee over a frozen snapshot of the partitioned store.
class CommitteeResidual final : public ResidualModel {
 public:
  CommitteeResidual(StoreSnapshot snapshot, Hyperparams hyp,
                    RegionSpec region, BcmConfig config,
                    VehicleParams vehicle);
  Prediction Evaluate(const StateVector& state) const override;

 private:
  StoreSnapshot snapshot_;
  Hyperparams hyp_;
  RegionSpec region_;
  BcmConfig config_;
  VehicleParams vehicle_;
};

// A single dictionary, e.g. the undivided baseline.
class DictionaryResidual final : public ResidualModel {
 public:
  DictionaryResidual(std::shared_ptr<const LocalDictionary> dict,
                     VehicleParams vehicle);
  Prediction Evaluate(const StateVector& state) const override;

 private:
  std::shared_ptr<const LocalDictionary> dict_;
  VehicleParams vehicle_;
};

// x_{k+1} = f(x_k, u_k) + B_d g(z_k). Writes g to `residual` when given.
StateVector HybridStep(const StateVector& state, const InputVector& input,
                       double dt, const VehicleParams& params,
                       const TireParams& tires, const ResidualModel& model,
                       Prediction* residual = nullptr);

}  // namespace split

#endif  // SPLIT_RESIDUAL_H_
