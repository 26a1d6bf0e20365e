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

#include "split/validate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "split/bcm.h"
#include "split/dictionary.h"
#include "split/errors.h"
#include "split/gp.h"
#include "split/learner.h"
#include "split/plant.h"
#include "split/region.h"
#include "split/residual.h"
#include "split/run_log.h"
#include "split/scenario.h"
#include "split/vehicle.h"

namespace split {
namespace {

std::string Fmt(const char* format, double v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

InvariantResult Bound(std::string name, double value, double limit,
                      const char* what = "max deviation") {
  InvariantResult r;
  r.name = std::move(name);
  r.passed = std::isfinite(value) && value < limit;
  r.detail = std::string(what) + " " + Fmt("%.3g", value) + " (limit " +
             Fmt("%.3g", limit) + ")";
  return r;
}

InvariantResult Flag(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

class Sampler {
 public:
  Sampler(const ScenarioConfig& config, std::uint64_t seed)
      : config_(config), rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  Feature BoxFeature() {
    const double a = config_.region.alpha_max;
    return {Uniform(-a, a), Uniform(-a, a), Uniform(-1.0, 1.0)};
  }

  Feature ValidFeature() {
    for (;;) {
      const Feature z = BoxFeature();
      if (CheckValidity(z, config_.vehicle, config_.tires, config_.region)
              .ok()) {
        return z;
      }
    }
  }

  Eigen::Vector3d Label() {
    std::normal_distribution<double> n(0.0, 0.05);
    return {n(rng_), n(rng_), n(rng_)};
  }

  // Moving state with speed in [5, 15] m/s and moderate slip.
  StateVector State() {
    StateVector x;
    x << Uniform(-50, 50), Uniform(-50, 50), Uniform(-3, 3), Uniform(5, 15),
        Uniform(-0.5, 0.5), Uniform(-0.5, 0.5), Uniform(-300, 600),
        Uniform(-0.15, 0.15);
    return x;
  }

  InputVector Input() { return {Uniform(-2000, 2000), Uniform(-0.5, 0.5)}; }

 private:
  const ScenarioConfig& config_;
  std::mt19937_64 rng_;
};

double MaxAbs(const Eigen::MatrixXd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

double PredictionGap(const Prediction& a, const Prediction& b) {
  return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(),
                  (a.variance - b.variance).cwiseAbs().maxCoeff());
}

// Store filled by random single-cell updates confined to `cells` cells.
std::unique_ptr<DictionaryStore> RandomStore(const ScenarioConfig& config,
                                             Sampler& sampler, int cells,
                                             int operations) {
  auto store = std::make_unique<DictionaryStore>(
      config.hyperparameters, config.region, config.learner, config.vehicle,
      config.tires);
  std::vector<Feature> centers;
  std::vector<CellIndex> used;
  while (static_cast<int>(centers.size()) < cells) {
    const Feature z = sampler.ValidFeature();
    const CellIndex c = CellOf(z, config.region);
    if (std::find(used.begin(), used.end(), c) != used.end()) continue;
    used.push_back(c);
    centers.push_back(z);
  }
  const Eigen::Vector3d& e = config.region.cell_edges;
  std::uniform_int_distribution<int> pick(0, cells - 1);
  for (int op = 0; op < operations; ++op) {
    const int c = op < cells ? op : pick(sampler.rng());
    const CellIndex cell = used[c];
    Feature z;
    for (int attempt = 0; attempt < 32; ++attempt) {
      z = Feature((cell.i + sampler.Uniform(0, 1)) * e[0],
                  (cell.j + sampler.Uniform(0, 1)) * e[1],
                  (cell.k + sampler.Uniform(0, 1)) * e[2]);
      if (CheckValidity(z, config.vehicle, config.tires, config.region).ok()) {
        break;
      }
      z = centers[c];
    }
    store->TryInsert({z, sampler.Label()}, 10.0);
  }
  return store;
}

// ---- vehicle_core

void VehicleSuite(const ScenarioConfig& c, Sampler& s,
                  std::vector<InvariantResult>* out) {
  const ResidualSelector& bd = VelocitySelector();
  out->push_back(Bound("vehicle.selector_pseudo_inverse",
                       MaxAbs(bd.transpose() * bd - Eigen::Matrix3d::Identity()),
                       1e-15));

  double odd = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = s.Uniform(-0.5, 0.5);
    for (Axle axle : {Axle::kFront, Axle::kRear}) {
      odd = std::max(odd, std::abs(TireLateralForce(a, axle, c.tires) +
                                   TireLateralForce(-a, axle, c.tires)));
    }
  }
  out->push_back(Bound("vehicle.tire_force_odd", odd, 1e-9));

  double self = 0.0;
  bool deterministic = true;
  for (int i = 0; i < 200; ++i) {
    const StateVector x = s.State();
    const InputVector u = s.Input();
    const StateVector next = Discretize(x, u, c.simulation.dt, c.vehicle, c.tires);
    self = std::max(self, ResidualLabel(x, u, next, c.simulation.dt, c.vehicle,
                                        c.tires)
                              .cwiseAbs()
                              .maxCoeff());
    deterministic &=
        (Discretize(x, u, c.simulation.dt, c.vehicle, c.tires).array() ==
         next.array())
            .all();
  }
  out->push_back(Flag("vehicle.self_label_zero", self == 0.0,
                      "max |label| " + Fmt("%.3g", self)));
  out->push_back(Flag("vehicle.discretize_deterministic", deterministic,
                      deterministic ? "bit-identical" : "outputs differ"));
}

// ---- plant

void PlantSuite(const ScenarioConfig& c, Sampler& s,
                std::vector<InvariantResult>* out) {
  const double dt = c.simulation.dt;
  double identity = 0.0;
  double pose = 0.0;
  PlantPerturbation quiet = c.perturbation;
  quiet.measurement_noise.setZero();
  for (int i = 0; i < 200; ++i) {
    const StateVector x = s.State();
    const InputVector u = s.Input();
    const StateVector next = PlantPropagate(x, u, dt, c.vehicle, c.tires,
                                            PlantPerturbation::Identity());
    identity = std::max(identity, ResidualLabel(x, u, next, dt, c.vehicle,
                                                c.tires)
                                      .cwiseAbs()
                                      .maxCoeff());
    StateVector moved = x;
    moved[kPosX] += s.Uniform(-100, 100);
    moved[kPosY] += s.Uniform(-100, 100);
    moved[kYaw] += s.Uniform(-3, 3);
    const Eigen::Vector3d a = ResidualLabel(
        x, u, PlantPropagate(x, u, dt, c.vehicle, c.tires, quiet), dt,
        c.vehicle, c.tires);
    const Eigen::Vector3d b = ResidualLabel(
        moved, u, PlantPropagate(moved, u, dt, c.vehicle, c.tires, quiet), dt,
        c.vehicle, c.tires);
    pose = std::max(pose, (a - b).cwiseAbs().maxCoeff());
  }
  out->push_back(Bound("plant.identity_labels_zero", identity, 1e-12,
                       "max |label|"));
  out->push_back(Bound("plant.labels_pose_invariant", pose, 1e-9));
}

// ---- gp

void GpSuite(const ScenarioConfig& c, Sampler& s,
             std::vector<InvariantResult>* out) {
  const Hyperparams& hyp = c.hyperparameters;
  double reversion = 0.0;
  double excess = -std::numeric_limits<double>::infinity();
  double interpolation = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  Hyperparams quiet = hyp;
  quiet.noise_variance = Eigen::Vector3d::Constant(1e-12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabeledSample> data;
    const int n = 1 + trial % 20;
    for (int i = 0; i < n; ++i) data.push_back({s.BoxFeature(), s.Label()});
    // Far query: 7 length scales past the data along the torque axis.
    Feature far = data[0].z;
    double top = -1e9;
    for (const auto& d : data) top = std::max(top, d.z[2]);
    far[2] = top + 7.0 * hyp.length_scales[2] + 1.0;
    const Prediction p = Posterior(data, far, hyp);
    for (int d = 0; d < 3; ++d) {
      const double sf = std::sqrt(hyp.signal_variance[d]);
      reversion = std::max(reversion, std::abs(p.mean[d]) / (1e-6 * sf));
      reversion = std::max(
          reversion, 0.999 * hyp.signal_variance[d] / p.variance[d]);
    }
    const Prediction q = Posterior(data, s.BoxFeature(), hyp);
    excess = std::max(excess, (q.variance - hyp.signal_variance).maxCoeff());
    // Interpolation at a well-separated training input.
    std::vector<LabeledSample> sparse = {data[0]};
    const Prediction at = Posterior(sparse, data[0].z, quiet);
    interpolation =
        std::max(interpolation, (at.mean - data[0].y).cwiseAbs().maxCoeff());
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) k(i, j) = Kernel(data[i].z, data[j].z, hyp);
    }
    const double asym = MaxAbs(k - k.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff() /
                                    hyp.signal_variance.maxCoeff() -
                                    asym);
  }
  out->push_back(Bound("gp.prior_reversion", reversion, 1.0,
                       "worst normalized distance from prior"));
  out->push_back(Bound("gp.variance_below_prior", excess, 1e-12,
                       "max variance excess"));
  out->push_back(Bound("gp.interpolation", interpolation, 1e-6));
  out->push_back(Flag("gp.kernel_psd", min_eig >= -1e-10,
                      "min eigenvalue / sf2 " + Fmt("%.3g", min_eig)));
}

// ---- region

void RegionSuite(const ScenarioConfig& c, Sampler& s,
                 std::vector<InvariantResult>* out) {
  const RegionSpec& r = c.region;
  const Eigen::Vector3d& e = r.cell_edges;
  int tiling_failures = 0;
  int gate_failures = 0;
  int translation_failures = 0;
  auto check_point = [&](const Feature& z) {
    const CellIndex cell = CellOf(z, r);
    // Cell bounds contain z (half-open); neighbours do not.
    const Eigen::Vector3d lo(cell.i * e[0], cell.j * e[1], cell.k * e[2]);
    const Eigen::Vector3d hi = lo + e;
    bool inside = true;
    for (int d = 0; d < 3; ++d) {
      inside &= lo[d] <= z[d] + 1e-15 * std::abs(z[d]) &&
                z[d] < hi[d] + 1e-15 * std::abs(z[d]);
    }
    if (!inside || !PartitionLattice(r).Contains(cell)) ++tiling_failures;
  };
  for (int i = 0; i < 100000; ++i) {
    const Feature z = s.BoxFeature();
    check_point(z);
    const Validity v = CheckValidity(z, c.vehicle, c.tires, r);
    if (!v.ok() && v.violations.empty()) ++gate_failures;
    const Feature shifted = z + e;
    const CellIndex a = CellCoordinates(z, r);
    const CellIndex b = CellCoordinates(shifted, r);
    if (b.i != a.i + 1 || b.j != a.j + 1 || b.k != a.k + 1) {
      ++translation_failures;
    }
  }
  // Boundary probes on every lattice plane inside the box.
  const Lattice lat = PartitionLattice(r);
  for (int i = lat.lo.i; i <= lat.hi.i; ++i) {
    for (int k = lat.lo.k; k <= lat.hi.k; ++k) {
      Feature z(i * e[0], s.Uniform(-r.alpha_max, r.alpha_max), k * e[2]);
      if (std::abs(z[0]) <= r.alpha_max && std::abs(z[2]) <= 1.0) {
        check_point(z);
      }
    }
  }
  out->push_back(Flag("region.partition_tiling", tiling_failures == 0,
                      std::to_string(tiling_failures) + " misplaced points"));
  out->push_back(Flag("region.validity_named", gate_failures == 0,
                      std::to_string(gate_failures) + " unnamed rejections"));
  out->push_back(Flag("region.cell_translation", translation_failures == 0,
                      std::to_string(translation_failures) + " offsets wrong"));
}

// ---- learner

void LearnerSuite(const ScenarioConfig& c, Sampler& s,
                  const ValidateOptions& options,
                  std::vector<InvariantResult>* out) {
  const auto owned = RandomStore(c, s, 60, 500);
  DictionaryStore& store = *owned;
  if (options.inject_cache_corruption) {
    store.CorruptCellForTesting(store.NonemptyCells().front(), 1e-3);
  }
  double scratch = 0.0;
  bool capacity_ok = true;
  int stored_invalid = 0;
  for (const auto& [cell, dict] : store.Snapshot()) {
    scratch = std::max(scratch, dict->ScratchDeviation());
    capacity_ok &= dict->size() <= c.learner.capacity;
    for (const auto& sample : dict->samples()) {
      if (!CheckValidity(sample.z, c.vehicle, c.tires, c.region).ok() ||
          !(CellOf(sample.z, c.region) == cell)) {
        ++stored_invalid;
      }
    }
  }
  out->push_back(Bound("learner.scratch_equivalence", scratch, 1e-8));
  out->push_back(Flag("learner.capacity", capacity_ok,
                      "cells " + std::to_string(store.nonempty_cells())));
  out->push_back(Flag("region.stored_samples_valid", stored_invalid == 0,
                      std::to_string(stored_invalid) + " invalid samples"));

  // Eviction removes the argmin and touches one cell only.
  bool locality = true;
  bool argmin = true;
  for (int i = 0; i < 200; ++i) {
    const StoreSnapshot before = store.Snapshot();
    const Feature z = s.ValidFeature();
    const CellIndex cell = CellOf(z, c.region);
    const auto old = store.Find(cell);
    const UpdateOutcome o = store.TryInsert({z, s.Label()}, 10.0);
    if (o.kind == UpdateOutcome::Kind::kReplaced && old) {
      const double lowest = old->gains().minCoeff();
      argmin &= old->gains()[o.evicted_slot] <=
                lowest + 1e-12 * old->SignalVariance();
    }
    for (const auto& [other, dict] : before) {
      if (other == cell) continue;
      locality &= store.Find(other) == dict;
    }
  }
  out->push_back(Flag("learner.eviction_argmin", argmin, ""));
  out->push_back(Flag("learner.locality", locality, ""));

  // Gain equals the noiseless posterior variance with the gain kernel.
  double identity = 0.0;
  for (int t = 0; t < 200; ++t) {
    LocalDictionary dict(c.hyperparameters, c.learner.capacity);
    std::vector<LabeledSample> data;
    const int n = 1 + t % c.learner.capacity;
    for (int i = 0; i < n; ++i) {
      data.push_back({s.BoxFeature(), s.Label()});
      dict.Append(data.back(), i);
    }
    Hyperparams noiseless = c.hyperparameters;
    noiseless.signal_variance.setConstant(dict.SignalVariance());
    noiseless.noise_variance.setZero();
    const Feature q = s.BoxFeature();
    identity = std::max(identity, std::abs(dict.MarginalGain(q) -
                                           Posterior(data, q, noiseless)
                                               .variance[0]));
  }
  out->push_back(Bound("learner.gain_variance_identity", identity, 1e-10));
}

// ---- bcm

void BcmSuite(const ScenarioConfig& c, Sampler& s,
              std::vector<InvariantResult>* out) {
  const Hyperparams& hyp = c.hyperparameters;
  const StoreSnapshot snapshot = RandomStore(c, s, 8, 60)->Snapshot();
  double single = 0.0;
  double neutral = 0.0;
  double order = 0.0;
  int accounting_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const Feature q = s.BoxFeature();
    const StoreEntry& first = snapshot[i % snapshot.size()];
    const StoreSnapshot one = {first};
    single = std::max(single,
                      PredictionGap(BcmPredict(one, q, hyp, c.region).prediction,
                                    first.second->Predict(q)));
    std::vector<Prediction> members;
    for (const auto& [cell, dict] : snapshot) members.push_back(dict->Predict(q));
    const BcmResult base = AggregateCommittee(members, hyp.signal_variance, true);
    std::vector<Prediction> padded = members;
    Prediction prior;
    prior.variance = hyp.signal_variance;
    padded.push_back(prior);
    neutral = std::max(
        neutral,
        PredictionGap(
            AggregateCommittee(padded, hyp.signal_variance, true).prediction,
            base.prediction));
    std::vector<Prediction> reversed(members.rbegin(), members.rend());
    order = std::max(
        order,
        PredictionGap(
            AggregateCommittee(reversed, hyp.signal_variance, true).prediction,
            base.prediction));
    if (base.clamped_outputs == 0) {
      for (int d = 0; d < 3; ++d) {
        double tightest = std::numeric_limits<double>::infinity();
        bool below_prior = true;
        for (const Prediction& m : members) {
          tightest = std::min(tightest, m.variance[d]);
          below_prior &= m.variance[d] <= hyp.signal_variance[d];
        }
        if (below_prior && base.prediction.variance[d] > tightest + 1e-12) {
          ++accounting_failures;
        }
      }
    }
  }
  out->push_back(Bound("bcm.single_member_reduction", single, 1e-12));
  out->push_back(Bound("bcm.empty_member_neutrality", neutral, 1e-12));
  out->push_back(Bound("bcm.order_independence", order, 1e-12));
  out->push_back(Flag("bcm.precision_accounting", accounting_failures == 0,
                      std::to_string(accounting_failures) + " violations"));
}

// ---- control

void ControlSuite(const ScenarioConfig& c, Sampler& s,
                  std::vector<InvariantResult>* out) {
  const CommitteeResidual model(RandomStore(c, s, 20, 150)->Snapshot(), c.hyperparameters, c.region,
                                c.controller.bcm, c.vehicle);
  double gap = 0.0;
  for (int i = 0; i < 200; ++i) {
    const StateVector x = s.State();
    const InputVector u = s.Input();
    const StateVector hybrid =
        HybridStep(x, u, c.simulation.dt, c.vehicle, c.tires, model);
    const StateVector manual =
        Discretize(x, u, c.simulation.dt, c.vehicle, c.tires) +
        VelocitySelector() * model.Evaluate(x).mean;
    gap = std::max(gap, (hybrid - manual).cwiseAbs().maxCoeff());
  }
  out->push_back(Flag("control.hybrid_consistency", gap == 0.0,
                      "max deviation " + Fmt("%.3g", gap)));
}

// ---- harness

void HarnessSuite(const ScenarioConfig& c, Sampler& s,
                  const ValidateOptions& options,
                  std::vector<InvariantResult>* out) {
  const auto owned = RandomStore(c, s, 30, 200);
  const DictionaryStore& store = *owned;
  std::stringstream file;
  WriteStore(file, store.Snapshot());
  DictionaryStore loaded(c.hyperparameters, c.region, c.learner, c.vehicle,
                         c.tires);
  double round_trip = 0.0;
  try {
    ReadStore(file, &loaded);
    if (loaded.nonempty_cells() != store.nonempty_cells()) {
      round_trip = std::numeric_limits<double>::infinity();
    }
    for (const auto& [cell, dict] : store.Snapshot()) {
      const auto other = loaded.Find(cell);
      if (!other || other->size() != dict->size()) {
        round_trip = std::numeric_limits<double>::infinity();
        continue;
      }
      round_trip = std::max(
          round_trip, MaxAbs(other->kernel_matrix() - dict->kernel_matrix()));
      for (int d = 0; d < 3; ++d) {
        round_trip = std::max(round_trip, MaxAbs(other->CholeskyFactor(d) -
                                                 dict->CholeskyFactor(d)));
      }
    }
  } catch (const std::exception&) {
    round_trip = std::numeric_limits<double>::infinity();
  }
  out->push_back(Bound("harness.store_round_trip", round_trip, 1e-12));

  if (!options.closed_loop) return;
  // One short lap with the fast tracking controller.
  ScenarioConfig run = c;
  run.laps = 1;
  run.controller.kind = ControllerKind::kMpc;
  const RunOutput first = RunScenario(run);
  const RunOutput second = RunScenario(run);
  const std::vector<StepRecord>& steps = first.log.steps;
  bool monotone = !steps.empty();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    monotone &= steps[i].step == static_cast<int>(i);
  }
  out->push_back(Flag("harness.one_record_per_step", monotone,
                      std::to_string(steps.size()) + " records"));
  const std::vector<LapSummary> recount =
      RecountLaps(steps, first.log.track_length, run.simulation.dt, run.laps);
  bool laps_ok = recount.size() == first.log.laps.size();
  for (std::size_t i = 0; laps_ok && i < recount.size(); ++i) {
    laps_ok &= recount[i].completed == first.log.laps[i].completed &&
               std::abs(recount[i].lap_time - first.log.laps[i].lap_time) <
                   1e-9 &&
               recount[i].steps == first.log.laps[i].steps;
  }
  out->push_back(Flag("harness.lap_recount", laps_ok,
                      std::to_string(recount.size()) + " laps"));
  std::ostringstream a, b;
  WriteStepCsv(a, first.log.steps);
  WriteStepCsv(b, second.log.steps);
  out->push_back(Flag("harness.deterministic_log", a.str() == b.str(),
                      a.str() == b.str() ? "bit-identical" : "logs differ"));
}

}  // namespace

std::vector<InvariantResult> RunInvariantSuite(const ScenarioConfig& config,
                                               const ValidateOptions& options) {
  Sampler sampler(config, config.seed);
  std::vector<InvariantResult> out;
  using Suite = std::function<void()>;
  const std::vector<std::pair<const char*, Suite>> suites = {
      {"vehicle", [&] { VehicleSuite(config, sampler, &out); }},
      {"plant", [&] { PlantSuite(config, sampler, &out); }},
      {"gp", [&] { GpSuite(config, sampler, &out); }},
      {"region", [&] { RegionSuite(config, sampler, &out); }},
      {"learner", [&] { LearnerSuite(config, sampler, options, &out); }},
      {"bcm", [&] { BcmSuite(config, sampler, &out); }},
      {"control", [&] { ControlSuite(config, sampler, &out); }},
      {"harness", [&] { HarnessSuite(config, sampler, options, &out); }},
  };
  for (const auto& [name, suite] : suites) {
    try {
      suite();
    } catch (const std::exception& e) {
      out.push_back({std::string(name) + ".exception", false, e.what()});
    }
  }
  return out;
}

bool AllPassed(const std::vector<InvariantResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const InvariantResult& r) { return r.passed; });
}

std::string InvariantReportJson(const std::vector<InvariantResult>& results) {
  nlohmann::ordered_json root;
  root["schema"] = "split-validate v1";
  root["passed"] = AllPassed(results);
  root["results"] = nlohmann::ordered_json::array();
  for (const InvariantResult& r : results) {
    root["results"].push_back(
        {{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  return root.dump(2) + "\n";
}

}  // namespace split
