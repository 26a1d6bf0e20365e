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

#include <benchmark/benchmark.h>

#include "split/config.h"
#include "split/control.h"
#include "split/residual.h"
#include "split/track.h"
#include "split/vehicle.h"

namespace split {
namespace {

ScenarioConfig Config() {
  ScenarioConfig c = DefaultScenarioConfig();
  c.track.file = SPLIT_DATA_DIR "/tracks/desk_circuit.txt";
  return c;
}

StateVector StartState(const Track& track, double speed) {
  StateVector x = StateVector::Zero();
  x.head<2>() = track.Position(0.0);
  x[kYaw] = track.Heading(0.0);
  x[kVx] = speed;
  return x;
}

void BM_Discretize(benchmark::State& state) {
  const ScenarioConfig c = Config();
  StateVector x = StateVector::Zero();
  x[kVx] = 10.0;
  x[kSteer] = 0.05;
  const InputVector u(100.0, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Discretize(x, u, 0.05, c.vehicle, c.tires));
  }
}
BENCHMARK(BM_Discretize);

void BM_MpccStep(benchmark::State& state) {
  const ScenarioConfig c = Config();
  const Track track = Track::FromFile(c.track.file, c.track.tube_radius, c.track.spacing);
  MpccController controller(c.controller.mpcc, c.vehicle, c.tires, track);
  const StateVector x = StartState(track, 8.0);
  const ZeroResidual zero;
  for (auto _ : state) {
    controller.Reset();
    benchmark::DoNotOptimize(controller.Step(x, 0.0, zero));
  }
}
BENCHMARK(BM_MpccStep)->Unit(benchmark::kMillisecond);

void BM_MpcStep(benchmark::State& state) {
  const ScenarioConfig c = Config();
  const Track track = Track::FromFile(c.track.file, c.track.tube_radius, c.track.spacing);
  MpcController controller(c.controller.mpc, c.vehicle, c.tires);
  const StateVector x = StartState(track, 7.5);
  const MpcReference ref =
      TrackReference(track, 0.0, x[kYaw], c.controller.reference_speed,
                     c.controller.mpc);
  const ZeroResidual zero;
  for (auto _ : state) {
    controller.Reset();
    benchmark::DoNotOptimize(controller.Step(x, ref, zero));
  }
}
BENCHMARK(BM_MpcStep)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace split

BENCHMARK_MAIN();
