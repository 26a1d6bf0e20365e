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

#include <memory>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "split/bcm.h"
#include "split/config.h"
#include "split/learner.h"
#include "split/region.h"

namespace split {
namespace {

struct Fixture {
  ScenarioConfig config = DefaultScenarioConfig();
  std::mt19937_64 rng{7};
  std::vector<Feature> valid;

  Fixture() {
    const double a = config.region.alpha_max;
    std::uniform_real_distribution<double> ua(-a, a), ut(-1.0, 1.0);
    while (valid.size() < 20000) {
      const Feature z(ua(rng), ua(rng), ut(rng));
      if (CheckValidity(z, config.vehicle, config.tires, config.region).ok()) {
        valid.push_back(z);
      }
    }
  }

  LabeledSample Sample() {
    std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
    std::normal_distribution<double> n(0.0, 0.05);
    return {valid[pick(rng)], {n(rng), n(rng), n(rng)}};
  }

  // Streams samples until the store holds about `size` samples.
  std::unique_ptr<DictionaryStore> Store(int size) {
    auto store = std::make_unique<DictionaryStore>(
        config.hyperparameters, config.region, config.learner, config.vehicle,
        config.tires);
    for (int i = 0;
         i < 50 * size && static_cast<int>(store->total_samples()) < size; ++i) {
      store->TryInsert(Sample(), 10.0);
    }
    return store;
  }
};

Fixture& Shared() {
  static Fixture f;
  return f;
}

void BM_SplitUpdate(benchmark::State& state) {
  Fixture& f = Shared();
  const auto store = f.Store(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(store->TryInsert(f.Sample(), 10.0));
  }
  state.counters["samples"] = static_cast<double>(store->total_samples());
}
BENCHMARK(BM_SplitUpdate)->Arg(100)->Arg(500)->Arg(2000)->Iterations(1000);

void BM_IolUpdate(benchmark::State& state) {
  Fixture& f = Shared();
  const int size = static_cast<int>(state.range(0));
  std::vector<LabeledSample> samples;
  for (int i = 0; i < size; ++i) samples.push_back(f.Sample());
  FlatStore flat(f.config.hyperparameters, f.config.region, f.config.learner,
                 f.config.vehicle, f.config.tires,
                 FlatCapacity(f.config.region, f.config.learner));
  flat.Load(samples);
  for (auto _ : state) {
    benchmark::DoNotOptimize(flat.TryInsert(f.Sample(), 10.0));
  }
}
BENCHMARK(BM_IolUpdate)
    ->Arg(100)
    ->Arg(500)
    ->Iterations(20)
    ->Unit(benchmark::kMicrosecond);

void BM_BcmPredict(benchmark::State& state) {
  Fixture& f = Shared();
  const StoreSnapshot snapshot =
      f.Store(static_cast<int>(state.range(0)))->Snapshot();
  for (auto _ : state) {
    benchmark::DoNotOptimize(BcmPredict(snapshot, f.Sample().z,
                                        f.config.hyperparameters,
                                        f.config.region));
  }
  state.counters["cells"] = static_cast<double>(snapshot.size());
}
BENCHMARK(BM_BcmPredict)->Arg(100)->Arg(500)->Arg(2000);

void BM_FullGpPredict(benchmark::State& state) {
  Fixture& f = Shared();
  const StoreSnapshot snapshot =
      f.Store(static_cast<int>(state.range(0)))->Snapshot();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        FullGpPredict(snapshot, f.Sample().z, f.config.hyperparameters));
  }
}
BENCHMARK(BM_FullGpPredict)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace split

BENCHMARK_MAIN();
