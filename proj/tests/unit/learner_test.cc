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

#include "split/learner.h"

#include <random>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "dense_gp.h"
#include "split/config.h"
#include "split/dictionary.h"
#include "split/errors.h"

namespace split {
namespace {

class LearnerTest : public ::testing::Test {
 protected:
  LearnerTest() : config_(DefaultScenarioConfig()) {}

  DictionaryStore MakeStore() {
    return DictionaryStore(config_.hyperparameters, config_.region,
                           config_.learner, config_.vehicle, config_.tires);
  }

  Feature ValidFeature() {
    std::uniform_real_distribution<double> a(-0.18, 0.18), t(-1, 1);
    for (;;) {
      const Feature z(a(rng_), a(rng_), t(rng_));
      if (CheckValidity(z, config_.vehicle, config_.tires, config_.region)
              .ok()) {
        return z;
      }
    }
  }

  Eigen::Vector3d Label() {
    std::normal_distribution<double> n(0, 0.05);
    return {n(rng_), n(rng_), n(rng_)};
  }

  Feature InCell(const CellIndex& c) {
    std::uniform_real_distribution<double> u(0, 1);
    const Eigen::Vector3d& e = config_.region.cell_edges;
    for (;;) {
      const Feature z((c.i + u(rng_)) * e[0], (c.j + u(rng_)) * e[1],
                      (c.k + u(rng_)) * e[2]);
      if (CheckValidity(z, config_.vehicle, config_.tires, config_.region)
              .ok()) {
        return z;
      }
    }
  }

  ScenarioConfig config_;
  std::mt19937_64 rng_{17};
};

TEST_F(LearnerTest, EmptyDictionaryGainIsSignalVariance) {
  LocalDictionary dict(config_.hyperparameters, 10);
  EXPECT_EQ(dict.MarginalGain(ValidFeature()),
            config_.hyperparameters.signal_variance.maxCoeff());
}

TEST_F(LearnerTest, DuplicateGainIsTiny) {
  LocalDictionary dict(config_.hyperparameters, 10);
  const Feature z = ValidFeature();
  dict.Append({z, Label()}, 0);
  EXPECT_LE(dict.MarginalGain(z), 2 * dict.Jitter());
}

TEST_F(LearnerTest, GainMatchesDenseOracle) {
  const oracle::DenseGp o{config_.hyperparameters.length_scales,
                          config_.hyperparameters.signal_variance,
                          config_.hyperparameters.noise_variance,
                          config_.hyperparameters.jitter_ratio};
  for (int t = 0; t < 50; ++t) {
    LocalDictionary dict(config_.hyperparameters, 10);
    Eigen::MatrixXd z(4, 3);
    for (int i = 0; i < 4; ++i) {
      const Feature f = ValidFeature();
      z.row(i) = f.transpose();
      dict.Append({f, Label()}, i);
    }
    const Feature q = ValidFeature();
    EXPECT_NEAR(dict.MarginalGain(q), o.Gain(z, q), 1e-10);
  }
}

TEST_F(LearnerTest, GainEqualsNoiselessPosteriorVariance) {
  for (int t = 0; t < 200; ++t) {
    LocalDictionary dict(config_.hyperparameters, 10);
    std::vector<LabeledSample> data;
    for (int i = 0; i < 1 + t % 10; ++i) {
      data.push_back({ValidFeature(), Label()});
      dict.Append(data.back(), i);
    }
    Hyperparams noiseless = config_.hyperparameters;
    noiseless.signal_variance.setConstant(dict.SignalVariance());
    noiseless.noise_variance.setZero();
    const Feature q = ValidFeature();
    EXPECT_NEAR(dict.MarginalGain(q), Posterior(data, q, noiseless).variance[0],
                1e-10);
  }
}

TEST_F(LearnerTest, FirstValidSampleAdded) {
  DictionaryStore store = MakeStore();
  const UpdateOutcome o = store.TryInsert({ValidFeature(), Label()}, 10.0);
  EXPECT_EQ(o.kind, UpdateOutcome::Kind::kAdded);
  EXPECT_EQ(store.total_samples(), 1u);
  EXPECT_EQ(store.nonempty_cells(), 1u);
}

TEST_F(LearnerTest, SpeedGateAndValidity) {
  DictionaryStore store = MakeStore();
  EXPECT_EQ(store.TryInsert({ValidFeature(), Label()}, 5.0).kind,
            UpdateOutcome::Kind::kRejectedSpeedGate);
  const UpdateOutcome o = store.TryInsert({Feature(0.19, 0.1, 0), Label()}, 10);
  EXPECT_EQ(o.kind, UpdateOutcome::Kind::kRejectedInvalid);
  EXPECT_FALSE(o.violations.empty());
  EXPECT_EQ(store.total_samples(), 0u);
}

TEST_F(LearnerTest, DistantPointReplacesDuplicate) {
  DictionaryStore store = MakeStore();
  const Feature z = ValidFeature();
  const CellIndex cell = CellOf(z, config_.region);
  // Duplicates enter through Load (admission would reject them).
  store.Load(cell, std::vector<LabeledSample>(10, {z, Label()}));
  Feature far = InCell(cell);
  while ((far - z).norm() < 0.01) far = InCell(cell);
  const UpdateOutcome o = store.TryInsert({far, Label()}, 10.0);
  EXPECT_EQ(o.kind, UpdateOutcome::Kind::kReplaced);
  EXPECT_GE(o.evicted_slot, 0);
  EXPECT_EQ(store.Find(cell)->size(), 10);
}

TEST_F(LearnerTest, LowGainRejected) {
  DictionaryStore store = MakeStore();
  const Feature z = ValidFeature();
  store.TryInsert({z, Label()}, 10.0);
  EXPECT_EQ(store.TryInsert({z, Label()}, 10.0).kind,
            UpdateOutcome::Kind::kRejectedLowGain);
}

TEST_F(LearnerTest, ScratchEquivalenceAfterRandomOperations) {
  DictionaryStore store = MakeStore();
  std::vector<CellIndex> cells;
  while (cells.size() < 60) {
    const CellIndex c = CellOf(ValidFeature(), config_.region);
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) {
      cells.push_back(c);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  int mutations = 0;
  for (int op = 0; op < 500; ++op) {
    const CellIndex& c = op < 60 ? cells[op] : cells[pick(rng_)];
    mutations += store.TryInsert({InCell(c), Label()}, 10.0).mutated();
  }
  EXPECT_GT(mutations, 100);
  EXPECT_GE(store.nonempty_cells(), 50u);
  for (const auto& [cell, dict] : store.Snapshot()) {
    EXPECT_LT(dict->ScratchDeviation(), 1e-8);
    EXPECT_LE(dict->size(), config_.learner.capacity);
    for (const auto& s : dict->samples()) EXPECT_EQ(CellOf(s.z, config_.region), cell);
  }
}

TEST_F(LearnerTest, EvictsArgminAndTouchesOneCell) {
  DictionaryStore store = MakeStore();
  for (int i = 0; i < 400; ++i) store.TryInsert({ValidFeature(), Label()}, 10.0);
  const CellIndex busy = store.Snapshot().front().first;
  for (int i = 0; i < 100; ++i) {
    const StoreSnapshot before = store.Snapshot();
    const auto old = store.Find(busy);
    const UpdateOutcome o = store.TryInsert({InCell(busy), Label()}, 10.0);
    if (o.kind == UpdateOutcome::Kind::kReplaced) {
      EXPECT_EQ(o.evicted_slot, old->EvictionIndex());
      EXPECT_LE(old->gains()[o.evicted_slot],
                old->gains().minCoeff() + 1e-12 * old->SignalVariance());
    }
    for (const auto& [cell, dict] : before) {
      if (cell != busy) EXPECT_EQ(store.Find(cell), dict);
    }
  }
}

TEST_F(LearnerTest, EvictionTieBreaksToOldest) {
  LocalDictionary dict(config_.hyperparameters, 3);
  const Feature z = ValidFeature();
  dict.Append({z, Label()}, 7);
  dict.Append({z, Label()}, 3);
  dict.Append({z, Label()}, 9);
  EXPECT_EQ(dict.sequence()[dict.EvictionIndex()], 3u);
}

TEST_F(LearnerTest, SnapshotIsImmutableUnderUpdates) {
  DictionaryStore store = MakeStore();
  const Feature z = ValidFeature();
  store.TryInsert({z, Label()}, 10.0);
  const StoreSnapshot snap = store.Snapshot();
  const auto dict = snap.front().second;
  const int before = dict->size();
  for (int i = 0; i < 20; ++i) {
    store.TryInsert({InCell(CellOf(z, config_.region)), Label()}, 10.0);
  }
  EXPECT_EQ(dict->size(), before);
  EXPECT_LT(dict->ScratchDeviation(), 1e-12);
}

TEST_F(LearnerTest, ConcurrentReadersSeeWholeDictionaries) {
  DictionaryStore store = MakeStore();
  const Feature z = ValidFeature();
  const CellIndex cell = CellOf(z, config_.region);
  store.TryInsert({z, Label()}, 10.0);
  std::atomic<bool> stop{false};
  std::atomic<int> torn{0};
  std::thread reader([&] {
    while (!stop) {
      const auto d = store.Find(cell);
      if (d && d->ScratchDeviation() > 1e-8) ++torn;
    }
  });
  for (int i = 0; i < 300; ++i) store.TryInsert({InCell(cell), Label()}, 10.0);
  stop = true;
  reader.join();
  EXPECT_EQ(torn, 0);
}

TEST_F(LearnerTest, FlatStoreSingleCellAgreesWithPartitioned) {
  DictionaryStore store = MakeStore();
  FlatStore flat(config_.hyperparameters, config_.region, config_.learner,
                 config_.vehicle, config_.tires, config_.learner.capacity);
  const CellIndex cell = CellOf(ValidFeature(), config_.region);
  for (int i = 0; i < 40; ++i) {
    const LabeledSample s{InCell(cell), Label()};
    const auto a = store.TryInsert(s, 10.0);
    const auto b = flat.TryInsert(s, 10.0);
    ASSERT_EQ(a.kind, b.kind) << "step " << i;
  }
  const auto dict = store.Find(cell);
  ASSERT_EQ(static_cast<std::size_t>(dict->size()), flat.size());
  for (int i = 0; i < dict->size(); ++i) {
    EXPECT_EQ(dict->samples()[i].z, flat.dictionary().samples()[i].z);
  }
}

TEST_F(LearnerTest, FlatStoreFirstSampleAdded) {
  FlatStore flat(config_.hyperparameters, config_.region, config_.learner,
                 config_.vehicle, config_.tires,
                 FlatCapacity(config_.region, config_.learner));
  EXPECT_EQ(flat.TryInsert({ValidFeature(), Label()}, 10.0).kind,
            UpdateOutcome::Kind::kAdded);
}

TEST_F(LearnerTest, CorruptionDetectedByScratchCheck) {
  DictionaryStore store = MakeStore();
  const Feature z = ValidFeature();
  const CellIndex cell = CellOf(z, config_.region);
  for (int i = 0; i < 5; ++i) store.TryInsert({InCell(cell), Label()}, 10.0);
  store.CorruptCellForTesting(cell, 1e-3);
  EXPECT_GT(store.Find(cell)->ScratchDeviation(), 1e-8);
}

TEST_F(LearnerTest, ConfigValidation) {
  LearnerConfig c;
  c.capacity = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

}  // namespace
}  // namespace split
