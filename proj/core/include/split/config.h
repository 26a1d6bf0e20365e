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

#ifndef SPLIT_CONFIG_H_
#define SPLIT_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "split/bcm.h"
#include "split/control.h"
#include "split/gp.h"
#include "split/learner.h"
#include "split/plant.h"
#include "split/region.h"
#include "split/vehicle.h"

namespace split {

enum class Mode { kNominal, kSplit, kIol };
enum class ControllerKind { kMpcc, kMpc };

std::string_view ModeName(Mode mode);
// Throws ConfigError for anything but nominal | split | iol.
Mode ParseMode(std::string_view name);
std::string_view ControllerName(ControllerKind kind);

struct TrackConfig {
  std::string file;  // resolved against the config file's directory
  double tube_radius = 2.0;
  // The run counts as crashed beyond tube_radius + crash_margin.
  double crash_margin = 1.0;
  double spacing = 0.5;
};

struct SimulationConfig {
  double dt = 0.05;
  double start_speed = 6.0;
  int max_steps_per_lap = 2000;
  // Simulated seconds charged per wall-clock second of an undivided-store
  // update; samples arriving while it is busy are dropped.
  double iol_time_scale = 1.0;
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kMpcc;
  MpcConfig mpc;
  double reference_speed = 7.5;  // m/s, for the tracking controller
  MpccConfig mpcc;
  BcmConfig bcm;  // committee settings used inside the controller
};

struct ScenarioConfig {
  VehicleParams vehicle;
  TireParams tires;
  PlantPerturbation perturbation = PlantPerturbation::Default();
  Hyperparams hyperparameters = DefaultHyperparams();
  RegionSpec region;
  LearnerConfig learner;
  ControllerConfig controller;
  TrackConfig track;
  SimulationConfig simulation;
  int laps = 2;
  std::uint64_t seed = 1;
  Mode mode = Mode::kSplit;

  // Module invariants plus cross-block consistency; throws ConfigError.
  void Validate() const;
};

ScenarioConfig DefaultScenarioConfig();

// JSON object with optional blocks vehicle, tire, perturbation,
// hyperparameters, region, learner, controller, track, simulation and
// scalars laps, seed, mode. Unknown keys are errors. Relative track paths
// resolve against `base_dir`.
ScenarioConfig ParseScenarioConfig(std::string_view text,
                                   const std::string& base_dir);
ScenarioConfig LoadScenarioConfig(const std::string& path);

// Full configuration as JSON, readable by ParseScenarioConfig.
std::string DumpScenarioConfig(const ScenarioConfig& config);

}  // namespace split

#endif  // SPLIT_CONFIG_H_
