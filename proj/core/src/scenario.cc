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

#include "split/scenario.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <utility>

#include "split/control.h"
#include "split/errors.h"
#include "split/plant.h"
#include "split/residual.h"
#include "split/track.h"

namespace split {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ElapsedNs(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                              start)
      .count();
}

std::string OutcomeText(const UpdateOutcome& out) {
  return std::string(OutcomeName(out.kind));
}

}  // namespace

std::vector<LapSummary> RecountLaps(const std::vector<StepRecord>& steps,
                                    double track_length, double dt, int laps) {
  std::vector<LapSummary> out;
  double previous_crossing = 0.0;
  std::size_t first = 0;
  for (int lap = 1; lap <= laps; ++lap) {
    LapSummary s;
    s.lap = lap;
    const double target = lap * track_length;
    std::size_t end = first;
    while (end < steps.size() && steps[end].progress < target) ++end;
    if (end == first) break;
    s.completed = end < steps.size();
    if (s.completed) {
      const StepRecord& a = steps[end - 1];
      const StepRecord& b = steps[end];
      const double crossing =
          a.time + (b.time - a.time) * (target - a.progress) /
                       (b.progress - a.progress);
      s.lap_time = crossing - previous_crossing;
      previous_crossing = crossing;
    }
    s.steps = static_cast<int>(end - first);
    double sq = 0.0, speed = 0.0;
    for (std::size_t k = first; k < end; ++k) {
      const StepRecord& r = steps[k];
      sq += r.contour_error * r.contour_error;
      speed += r.state[kVx];
      if (k + 1 < steps.size()) {
        const double ay = (steps[k + 1].state[kVy] - r.state[kVy]) / dt +
                          r.state[kVx] * r.state[kYawRate];
        s.max_lateral_g = std::max(s.max_lateral_g, std::abs(ay) / kGravity);
      }
      if (r.outcome == "added" || r.outcome == "replaced") ++s.update_count;
    }
    s.lateral_rms = std::sqrt(sq / s.steps);
    s.mean_speed = speed / s.steps;
    const StepRecord& last = steps[end - 1];
    s.training_set_size = last.store_size;
    s.nonempty_cells = last.nonempty_cells;
    out.push_back(s);
    first = end;
  }
  return out;
}

RunOutput RunScenario(const ScenarioConfig& config) {
  config.Validate();
  const Track track = Track::FromFile(config.track.file,
                                      config.track.tube_radius,
                                      config.track.spacing);
  const double dt = config.simulation.dt;
  const double length = track.length();

  RunOutput output;
  RunLog& log = output.log;
  log.mode = std::string(ModeName(config.mode));
  log.controller = std::string(ControllerName(config.controller.kind));
  log.seed = config.seed;

  if (config.mode == Mode::kSplit) {
    output.store = std::make_shared<DictionaryStore>(
        config.hyperparameters, config.region, config.learner, config.vehicle,
        config.tires);
  } else if (config.mode == Mode::kIol) {
    output.flat = std::make_shared<FlatStore>(
        config.hyperparameters, config.region, config.learner, config.vehicle,
        config.tires, FlatCapacity(config.region, config.learner));
  }

  std::optional<MpcController> mpc;
  std::optional<MpccController> mpcc;
  if (config.controller.kind == ControllerKind::kMpc) {
    mpc.emplace(config.controller.mpc, config.vehicle, config.tires);
  } else {
    mpcc.emplace(config.controller.mpcc, config.vehicle, config.tires, track);
  }

  Plant plant(config.vehicle, config.tires, config.perturbation,
              SafeEnvelope{}, config.seed);
  StateVector start = StateVector::Zero();
  const Eigen::Vector2d origin = track.Position(0.0);
  start[kPosX] = origin.x();
  start[kPosY] = origin.y();
  start[kYaw] = track.Heading(0.0);
  start[kVx] = config.simulation.start_speed;
  plant.Reset(start);
  StateVector measured = plant.Measure();

  const ZeroResidual zero;
  const long max_steps =
      static_cast<long>(config.simulation.max_steps_per_lap) * config.laps;
  double theta = 0.0;
  double busy_until = 0.0;

  auto fill_store = [&](StepRecord* rec) {
    if (output.store) {
      rec->store_size = output.store->total_samples();
      rec->nonempty_cells = output.store->nonempty_cells();
    } else if (output.flat) {
      rec->store_size = output.flat->size();
      rec->nonempty_cells = rec->store_size > 0 ? 1 : 0;
    }
  };

  for (long k = 0;; ++k) {
    if (k >= max_steps) {
      log.crashed = true;
      log.crash_reason = "step budget exhausted";
      break;
    }
    StepRecord rec;
    rec.step = static_cast<int>(k);
    rec.time = k * dt;
    rec.state = measured;
    if (k > 0) {
      theta = track.Project(measured.head<2>(),
                            theta + measured[kVx] * dt, 2.0);
    }
    rec.progress = theta;
    rec.lap = static_cast<int>(std::floor(theta / length)) + 1;
    const LagContour err =
        LagContourErrors(measured[kPosX], measured[kPosY], theta, track);
    rec.lag_error = err.lag;
    rec.contour_error = err.contour;

    std::unique_ptr<ResidualModel> model;
    if (output.store) {
      model = std::make_unique<CommitteeResidual>(
          output.store->Snapshot(), config.hyperparameters, config.region,
          config.controller.bcm, config.vehicle);
    } else if (output.flat) {
      model = std::make_unique<DictionaryResidual>(output.flat->Shared(),
                                                   config.vehicle);
    }
    const ResidualModel& g =
        model ? *model : static_cast<const ResidualModel&>(zero);

    if (std::abs(err.contour) >
        config.track.tube_radius + config.track.crash_margin) {
      log.crashed = true;
      log.crash_reason = "left the track tube";
      fill_store(&rec);
      log.steps.push_back(rec);
      break;
    }

    {
      const auto t0 = Clock::now();
      rec.prediction = g.Evaluate(measured);
      rec.eval_ns = ElapsedNs(t0);
    }

    try {
      if (mpc) {
        const MpcReference ref =
            TrackReference(track, theta, measured[kYaw],
                           config.controller.reference_speed, mpc->config());
        const MpcResult res = mpc->Step(measured, ref, g);
        rec.input = res.input;
        rec.qp_iterations = res.stats.qp_iterations;
        rec.degraded = res.stats.degraded;
        rec.progress_rate = config.controller.reference_speed;
      } else {
        const MpccResult res = mpcc->Step(measured, theta, g);
        rec.input = res.input;
        rec.progress_rate = res.progress_rate;
        rec.qp_iterations = res.stats.qp_iterations;
        rec.degraded = res.stats.degraded;
      }
    } catch (const DomainError& e) {
      log.crashed = true;
      log.crash_reason = std::string("controller: ") + e.what();
      fill_store(&rec);
      log.steps.push_back(rec);
      break;
    }

    StateVector next;
    try {
      next = plant.Step(rec.input, dt);
    } catch (const DomainError& e) {
      log.crashed = true;
      log.crash_reason = std::string("plant: ") + e.what();
      fill_store(&rec);
      log.steps.push_back(rec);
      break;
    }

    if (measured[kVx] >= config.vehicle.min_speed) {
      rec.feature = SlipTorqueFeature(measured, config.vehicle);
      rec.label = ResidualLabel(measured, rec.input, next, dt, config.vehicle,
                                config.tires);
      const LabeledSample sample{rec.feature, rec.label};
      if (output.store) {
        const auto t0 = Clock::now();
        const UpdateOutcome out = output.store->TryInsert(sample, measured[kVx]);
        rec.update_ns = ElapsedNs(t0);
        rec.outcome = OutcomeText(out);
      } else if (output.flat) {
        if (rec.time >= busy_until) {
          const auto t0 = Clock::now();
          const UpdateOutcome out =
              output.flat->TryInsert(sample, measured[kVx]);
          rec.update_ns = ElapsedNs(t0);
          rec.outcome = OutcomeText(out);
          busy_until = rec.time + config.simulation.iol_time_scale *
                                      static_cast<double>(rec.update_ns) * 1e-9;
        } else {
          rec.outcome = "busy";
        }
      }
    }
    fill_store(&rec);
    log.steps.push_back(rec);
    measured = next;
    if (theta >= config.laps * length) break;
  }

  log.track_length = length;
  log.laps = RecountLaps(log.steps, length, dt, config.laps);
  return output;
}

}  // namespace split
