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

#include "split/replay.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <memory>

#include "json.hpp"
#include "split/bcm.h"
#include "split/dictionary.h"
#include "split/errors.h"
#include "split/gp.h"
#include "split/learner.h"

namespace split {
namespace {

bool Usable(const StepRecord& r, const VehicleParams& vehicle) {
  return r.state[kVx] >= vehicle.min_speed;
}

bool InLaps(int lap, const std::vector<int>& laps) {
  return std::find(laps.begin(), laps.end(), lap) != laps.end();
}

// Per-dimension span of the training inputs, floored away from zero.
template <int Dim>
FeatureT<Dim> Span(const std::vector<FeatureT<Dim>>& zs) {
  FeatureT<Dim> lo = zs.front(), hi = zs.front();
  for (const auto& z : zs) {
    lo = lo.cwiseMin(z);
    hi = hi.cwiseMax(z);
  }
  return (hi - lo).cwiseMax(1e-6);
}

// Length scales = span * c by training-set likelihood: a shared c from a
// fixed grid, then per-dimension coordinate passes over the same grid.
template <int Dim>
HyperparamsT<Dim> FitHyperparams(const std::vector<FeatureT<Dim>>& zs,
                                 const std::vector<Eigen::Vector3d>& ys,
                                 const Hyperparams& base) {
  std::vector<LabeledSampleT<Dim>> samples;
  for (std::size_t i = 0; i < zs.size(); ++i) samples.push_back({zs[i], ys[i]});
  HyperparamsT<Dim> hyp;
  hyp.signal_variance = base.signal_variance;
  hyp.noise_variance = base.noise_variance;
  hyp.jitter_ratio = base.jitter_ratio;
  const FeatureT<Dim> span = Span(zs);
  const std::span<const LabeledSampleT<Dim>> view(samples);
  constexpr double kGrid[] = {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8,
                              1.0 / 4,  1.0 / 2,  1.0,      2.0};
  double best = -std::numeric_limits<double>::infinity();
  FeatureT<Dim> best_scales = span / 8.0;
  for (double c : kGrid) {
    hyp.length_scales = span * c;
    const double lml = LogMarginalLikelihood(view, hyp);
    if (lml > best) {
      best = lml;
      best_scales = hyp.length_scales;
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (int d = 0; d < Dim; ++d) {
      for (double c : kGrid) {
        hyp.length_scales = best_scales;
        hyp.length_scales[d] = span[d] * c;
        const double lml = LogMarginalLikelihood(view, hyp);
        if (lml > best) {
          best = lml;
          best_scales = hyp.length_scales;
        }
      }
    }
  }
  hyp.length_scales = best_scales;
  return hyp;
}

// Online marginal-gain selection into one dictionary of `budget` samples
// (filled before any eviction), then held-out RMSE per output.
template <int Dim>
Eigen::Vector3d SelectAndScore(
    const std::vector<FeatureT<Dim>>& train_z,
    const std::vector<Eigen::Vector3d>& train_y,
    const std::vector<FeatureT<Dim>>& eval_z,
    const std::vector<Eigen::Vector3d>& eval_y, const Hyperparams& base,
    int budget, int* size) {
  const HyperparamsT<Dim> hyp = FitHyperparams(train_z, train_y, base);
  LocalDictionaryT<Dim> dict(hyp, budget, GainMode::kInverseDiagonal);
  for (std::size_t i = 0; i < train_z.size(); ++i) {
    AdmitSample(dict, LabeledSampleT<Dim>{train_z[i], train_y[i]}, i, 0.0);
  }
  *size = dict.size();
  Eigen::Vector3d sq = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < eval_z.size(); ++i) {
    const Eigen::Vector3d e = eval_y[i] - dict.Predict(eval_z[i]).mean;
    sq += e.cwiseProduct(e);
  }
  return (sq / static_cast<double>(eval_z.size())).cwiseSqrt();
}

}  // namespace

ReplayReport Replay(const std::vector<StepRecord>& steps,
                    const ScenarioConfig& config, const ReplayOptions& options,
                    DictionaryStore* store) {
  std::vector<int> eval_laps = options.eval_laps;
  if (eval_laps.empty()) {
    for (const StepRecord& r : steps) {
      if (r.lap > options.train_lap && !InLaps(r.lap, eval_laps)) {
        eval_laps.push_back(r.lap);
      }
    }
  }
  std::vector<const StepRecord*> train, eval;
  for (const StepRecord& r : steps) {
    if (!Usable(r, config.vehicle)) continue;
    if (r.lap == options.train_lap) train.push_back(&r);
    if (InLaps(r.lap, eval_laps)) eval.push_back(&r);
  }
  if (train.empty()) throw SchemaError("replay: no records on the training lap");
  if (eval.empty()) throw SchemaError("replay: no held-out records");

  std::unique_ptr<DictionaryStore> owned;
  if (!store) {
    owned = std::make_unique<DictionaryStore>(
        config.hyperparameters, config.region, config.learner, config.vehicle,
        config.tires);
    store = owned.get();
  }
  store->Clear();
  for (const StepRecord* r : train) {
    store->TryInsert({r->feature, r->label}, r->state[kVx]);
  }
  const StoreSnapshot snapshot = store->Snapshot();

  ReplayReport report;
  AccuracyReport& acc = report.accuracy;
  acc.train_records = train.size();
  acc.eval_records = eval.size();
  acc.store_samples = store->total_samples();
  acc.nonempty_cells = store->nonempty_cells();
  Eigen::Vector3d nominal_sq = Eigen::Vector3d::Zero();
  Eigen::Vector3d hybrid_sq = Eigen::Vector3d::Zero();
  for (const StepRecord* r : eval) {
    const Eigen::Vector3d mean =
        snapshot.empty()
            ? Eigen::Vector3d::Zero()
            : BcmPredict(snapshot, r->feature, config.hyperparameters,
                         config.region, config.controller.bcm)
                  .prediction.mean;
    const Eigen::Vector3d e = r->label - mean;
    nominal_sq += r->label.cwiseProduct(r->label);
    hybrid_sq += e.cwiseProduct(e);
  }
  const double n = static_cast<double>(eval.size());
  acc.nominal_rmse = (nominal_sq / n).cwiseSqrt();
  acc.hybrid_rmse = (hybrid_sq / n).cwiseSqrt();
  acc.nominal_norm_rmse = std::sqrt(nominal_sq.sum() / n);
  acc.hybrid_norm_rmse = std::sqrt(hybrid_sq.sum() / n);

  if (options.ablation) {
    std::vector<Eigen::Vector3d> tz3, ez3, ty, ey;
    std::vector<Eigen::Matrix<double, 5, 1>> tz5, ez5;
    for (const StepRecord* r : train) {
      tz3.push_back(r->feature);
      tz5.push_back(StateFeature(r->state, config.vehicle));
      ty.push_back(r->label);
    }
    for (const StepRecord* r : eval) {
      ez3.push_back(r->feature);
      ez5.push_back(StateFeature(r->state, config.vehicle));
      ey.push_back(r->label);
    }
    AblationReport ab;
    ab.budget = options.ablation_budget;
    ab.slip_torque_rmse = SelectAndScore<3>(
        tz3, ty, ez3, ey, config.hyperparameters, ab.budget,
        &ab.slip_torque_size);
    ab.state_rmse = SelectAndScore<5>(tz5, ty, ez5, ey, config.hyperparameters,
                                      ab.budget, &ab.state_size);
    report.ablation = ab;
  }
  return report;
}

std::string ReplayReportJson(const ReplayReport& report) {
  auto vec = [](const Eigen::Vector3d& v) {
    return nlohmann::ordered_json::array({v[0], v[1], v[2]});
  };
  const AccuracyReport& a = report.accuracy;
  nlohmann::ordered_json root;
  root["schema"] = "split-replay v1";
  root["train_records"] = a.train_records;
  root["eval_records"] = a.eval_records;
  root["store_samples"] = a.store_samples;
  root["nonempty_cells"] = a.nonempty_cells;
  root["states"] = {"vx", "vy", "yaw_rate"};
  root["nominal_rmse"] = vec(a.nominal_rmse);
  root["hybrid_rmse"] = vec(a.hybrid_rmse);
  root["nominal_norm_rmse"] = a.nominal_norm_rmse;
  root["hybrid_norm_rmse"] = a.hybrid_norm_rmse;
  root["norm_reduction"] =
      a.nominal_norm_rmse > 0.0 ? 1.0 - a.hybrid_norm_rmse / a.nominal_norm_rmse
                                : 0.0;
  if (report.ablation) {
    const AblationReport& b = *report.ablation;
    root["ablation"] = {{"budget", b.budget},
                        {"slip_torque_rmse", vec(b.slip_torque_rmse)},
                        {"slip_torque_size", b.slip_torque_size},
                        {"state_rmse", vec(b.state_rmse)},
                        {"state_size", b.state_size}};
  }
  return root.dump(2) + "\n";
}

}  // namespace split
