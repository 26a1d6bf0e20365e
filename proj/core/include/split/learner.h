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

#ifndef SPLIT_LEARNER_H_
#define SPLIT_LEARNER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "split/dictionary.h"
#include "split/gp.h"
#include "split/region.h"
#include "split/vehicle.h"

namespace split {

struct LearnerConfig {
  int capacity = 10;                  // M
  double gain_threshold_ratio = 1e-4;  // admission threshold / sigma_f^2
  double speed_gate = 5.0;             // m/s, learn only above this speed

  void Validate() const;
};

struct UpdateOutcome {
  enum class Kind {
    kAdded,
    kReplaced,
    kRejectedLowGain,
    kRejectedInvalid,
    kRejectedSpeedGate,
  };

  Kind kind = Kind::kRejectedLowGain;
  double gain = 0.0;            // gamma of the candidate, when computed
  int evicted_slot = -1;        // for kReplaced
  std::vector<Violation> violations;  // for kRejectedInvalid

  bool mutated() const { return kind == Kind::kAdded || kind == Kind::kReplaced; }
};

std::string_view OutcomeName(UpdateOutcome::Kind kind);

// Admission/eviction on one dictionary: add when not full and gamma exceeds
// the threshold; when full, replace the lowest-gain sample if gamma exceeds
// it. Mutates `dict` only on kAdded/kReplaced.
template <int Dim>
UpdateOutcome AdmitSample(LocalDictionaryT<Dim>& dict,
                          const LabeledSampleT<Dim>& sample, std::uint64_t seq,
                          double threshold) {
  UpdateOutcome out;
  out.gain = dict.MarginalGain(sample.z);
  if (!dict.full()) {
    if (out.gain > threshold) {
      dict.Append(sample, seq);
      out.kind = UpdateOutcome::Kind::kAdded;
    }
    return out;
  }
  const int slot = dict.EvictionIndex();
  if (out.gain > dict.gains()[slot]) {
    dict.Replace(slot, sample, seq);
    out.kind = UpdateOutcome::Kind::kReplaced;
    out.evicted_slot = slot;
  }
  return out;
}

// Read-only view of the partitioned store: non-empty cells in lattice order.
using StoreEntry = std::pair<CellIndex, std::shared_ptr<const LocalDictionary>>;
using StoreSnapshot = std::vector<StoreEntry>;

std::size_t TotalSamples(const StoreSnapshot& snapshot);

// Partitioned store of local dictionaries with a single writer.
//
// Each cell holds an immutable dictionary behind a shared pointer; an update
// builds a modified copy and swaps it in, so readers holding a snapshot see
// either the whole old or the whole new dictionary of a cell.
class DictionaryStore {
 public:
  DictionaryStore(Hyperparams hyp, RegionSpec region, LearnerConfig config,
                  VehicleParams vehicle, TireParams tires);

  // Speed gate, validity, cell lookup, then admission into that cell only.
  // On NumericalError the cell keeps its previous contents and the error
  // propagates.
  UpdateOutcome TryInsert(const LabeledSample& sample, double speed);

  StoreSnapshot Snapshot() const;
  std::shared_ptr<const LocalDictionary> Find(const CellIndex& cell) const;

  std::size_t total_samples() const;
  std::size_t nonempty_cells() const;
  std::vector<CellIndex> NonemptyCells() const;
  std::uint64_t update_count() const { return updates_; }

  // Installs a dictionary rebuilt from scratch for `samples` (oldest first).
  void Load(const CellIndex& cell, std::vector<LabeledSample> samples);
  void Clear();

  // Test hook for fault injection in one cell.
  void CorruptCellForTesting(const CellIndex& cell, double delta);

  const Hyperparams& hyperparams() const { return hyp_; }
  const RegionSpec& region() const { return region_; }
  const LearnerConfig& config() const { return config_; }
  const VehicleParams& vehicle() const { return vehicle_; }
  const TireParams& tires() const { return tires_; }

 private:
  double Threshold() const;

  Hyperparams hyp_;
  RegionSpec region_;
  LearnerConfig config_;
  VehicleParams vehicle_;
  TireParams tires_;
  mutable std::mutex mutex_;
  std::map<CellIndex, std::shared_ptr<const LocalDictionary>> cells_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t updates_ = 0;
  std::size_t total_ = 0;
};

// Undivided baseline set of capacity K * M with the same admission rule.
class FlatStore {
 public:
  FlatStore(Hyperparams hyp, RegionSpec region, LearnerConfig config,
            VehicleParams vehicle, TireParams tires, int capacity);

  UpdateOutcome TryInsert(const LabeledSample& sample, double speed);

  const LocalDictionary& dictionary() const { return *dict_; }
  std::shared_ptr<const LocalDictionary> Shared() const { return dict_; }
  std::size_t size() const { return static_cast<std::size_t>(dict_->size()); }
  std::uint64_t update_count() const { return updates_; }

  // Replaces the contents with `samples` without running admission.
  void Load(std::vector<LabeledSample> samples);

 private:
  Hyperparams hyp_;
  RegionSpec region_;
  LearnerConfig config_;
  VehicleParams vehicle_;
  TireParams tires_;
  std::shared_ptr<const LocalDictionary> dict_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t updates_ = 0;
};

// Capacity of the undivided baseline: cells in the partition times M.
int FlatCapacity(const RegionSpec& region, const LearnerConfig& config);

}  // namespace split

#endif  // SPLIT_LEARNER_H_
