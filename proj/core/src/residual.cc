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

#include "split/residual.h"

#include <utility>

namespace split {

CommitteeResidual::CommitteeResidual(StoreSnapshot snapshot, Hyperparams hyp,
                                     RegionSpec region, BcmConfig config,
                                     VehicleParams vehicle)
    : snapshot_(std::move(snapshot)),
      hyp_(std::move(hyp)),
      region_(std::move(region)),
      config_(config),
      vehicle_(vehicle) {}

Prediction CommitteeResidual::Evaluate(const StateVector& state) const {
  if (state[kVx] < vehicle_.min_speed || snapshot_.empty()) {
    return {Eigen::Vector3d::Zero(), hyp_.signal_variance};
  }
  return BcmPredict(snapshot_, SlipTorqueFeature(state, vehicle_), hyp_,
                    region_, config_)
      .prediction;
}

DictionaryResidual::DictionaryResidual(
    std::shared_ptr<const LocalDictionary> dict, VehicleParams vehicle)
    : dict_(std::move(dict)), vehicle_(vehicle) {}

Prediction DictionaryResidual::Evaluate(const StateVector& state) const {
  if (state[kVx] < vehicle_.min_speed || !dict_ || dict_->empty()) return {};
  return dict_->Predict(SlipTorqueFeature(state, vehicle_));
}

StateVector HybridStep(const StateVector& state, const InputVector& input,
                       double dt, const VehicleParams& params,
                       const TireParams& tires, const ResidualModel& model,
                       Prediction* residual) {
  const Prediction g = model.Evaluate(state);
  if (residual) *residual = g;
  return Discretize(state, input, dt, params, tires) +
         VelocitySelector() * g.mean;
}

}  // namespace split
