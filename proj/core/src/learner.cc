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

#include <numeric>

namespace split {

void LearnerConfig::Validate() const {
  if (capacity < 1) throw ConfigError("learner.capacity must be >= 1");
  if (!(gain_threshold_ratio >= 0.0)) {
    throw ConfigError("learner.gain_threshold_ratio must be >= 0");
  }
  if (!(speed_gate >= 0.0)) throw ConfigError("learner.speed_gate must be >= 0");
}

std::string_view OutcomeName(UpdateOutcome::Kind kind) {
  switch (kind) {
    case UpdateOutcome::Kind::kAdded:
      return "added";
    case UpdateOutcome::Kind::kReplaced:
      return "replaced";
    case UpdateOutcome::Kind::kRejectedLowGain:
      return "rejected-low-gain";
    case UpdateOutcome::Kind::kRejectedInvalid:
      return "rejected-invalid";
    case UpdateOutcome::Kind::kRejectedSpeedGate:
      return "rejected-speed-gate";
  }
  return "unknown";
}

std::size_t TotalSamples(const StoreSnapshot& snapshot) {
  std::size_t n = 0;
  for (const auto& [cell, dict] : snapshot) n += dict->size();
  return n;
}

namespace {

// Shared pre-admission filter.
std::optional<UpdateOutcome> Screen(const LabeledSample& sample, double speed,
                                    const LearnerConfig& config,
                                    const VehicleParams& vehicle,
                                    const TireParams& tires,
                                    const RegionSpec& region) {
  if (!(speed > config.speed_gate)) {
    UpdateOutcome out;
    out.kind = UpdateOutcome::Kind::kRejectedSpeedGate;
    return out;
  }
  Validity validity = CheckValidity(sample.z, vehicle, tires, region);
  if (!validity.ok() || !sample.y.allFinite()) {
    UpdateOutcome out;
    out.kind = UpdateOutcome::Kind::kRejectedInvalid;
    out.violations = std::move(validity.violations);
    return out;
  }
  return std::nullopt;
}

}  // namespace

DictionaryStore::DictionaryStore(Hyperparams hyp, RegionSpec region,
                                 LearnerConfig config, VehicleParams vehicle,
                                 TireParams tires)
    : hyp_(std::move(hyp)),
      region_(std::move(region)),
      config_(config),
      vehicle_(vehicle),
      tires_(tires) {}

double DictionaryStore::Threshold() const {
  return config_.gain_threshold_ratio * hyp_.GainVariance();
}

UpdateOutcome DictionaryStore::TryInsert(const LabeledSample& sample,
                                         double speed) {
  if (auto rejected =
          Screen(sample, speed, config_, vehicle_, tires_, region_)) {
    return *std::move(rejected);
  }
  const CellIndex cell = CellOf(sample.z, region_);
  std::shared_ptr<const LocalDictionary> current = Find(cell);

  // Decide against the published dictionary first; copy only on mutation.
  UpdateOutcome out;
  const double threshold = Threshold();
  if (current) {
    out.gain = current->MarginalGain(sample.z);
    const bool admit =
        current->full() ? out.gain > current->gains()[current->EvictionIndex()]
                        : out.gain > threshold;
    if (!admit) return out;
  }
  auto next = current ? std::make_shared<LocalDictionary>(*current)
                      : std::make_shared<LocalDictionary>(hyp_, config_.capacity);
  const int before = next->size();
  out = AdmitSample(*next, sample, next_seq_, threshold);
  if (!out.mutated()) return out;
  ++next_seq_;
  ++updates_;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    total_ += static_cast<std::size_t>(next->size() - before);
    cells_[cell] = std::move(next);
  }
  return out;
}

StoreSnapshot DictionaryStore::Snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return StoreSnapshot(cells_.begin(), cells_.end());
}

std::shared_ptr<const LocalDictionary> DictionaryStore::Find(
    const CellIndex& cell) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cells_.find(cell);
  return it == cells_.end() ? nullptr : it->second;
}

std::size_t DictionaryStore::total_samples() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return total_;
}

std::size_t DictionaryStore::nonempty_cells() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cells_.size();
}

std::vector<CellIndex> DictionaryStore::NonemptyCells() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<CellIndex> out;
  out.reserve(cells_.size());
  for (const auto& [cell, dict] : cells_) out.push_back(cell);
  return out;
}

void DictionaryStore::Load(const CellIndex& cell,
                           std::vector<LabeledSample> samples) {
  if (samples.empty()) return;
  if (static_cast<int>(samples.size()) > config_.capacity) {
    throw ConfigError("stored cell " + ToString(cell) + " exceeds capacity");
  }
  std::vector<std::uint64_t> seq(samples.size());
  std::iota(seq.begin(), seq.end(), next_seq_);
  next_seq_ += seq.size();
  auto dict = std::make_shared<LocalDictionary>(LocalDictionary::FromSamples(
      hyp_, config_.capacity, GainMode::kLeaveOneOutCaches, std::move(samples),
      std::move(seq)));
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cells_.find(cell);
  if (it != cells_.end()) total_ -= it->second->size();
  total_ += dict->size();
  cells_[cell] = std::move(dict);
}

void DictionaryStore::Clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  cells_.clear();
  total_ = 0;
}

void DictionaryStore::CorruptCellForTesting(const CellIndex& cell,
                                            double delta) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cells_.find(cell);
  if (it == cells_.end()) return;
  auto copy = std::make_shared<LocalDictionary>(*it->second);
  copy->CorruptCacheForTesting(delta);
  it->second = std::move(copy);
}

FlatStore::FlatStore(Hyperparams hyp, RegionSpec region, LearnerConfig config,
                     VehicleParams vehicle, TireParams tires, int capacity)
    : hyp_(std::move(hyp)),
      region_(std::move(region)),
      config_(config),
      vehicle_(vehicle),
      tires_(tires),
      dict_(std::make_shared<LocalDictionary>(hyp_, capacity,
                                              GainMode::kInverseDiagonal)) {}

UpdateOutcome FlatStore::TryInsert(const LabeledSample& sample, double speed) {
  if (auto rejected =
          Screen(sample, speed, config_, vehicle_, tires_, region_)) {
    return *std::move(rejected);
  }
  const double threshold = config_.gain_threshold_ratio * hyp_.GainVariance();
  UpdateOutcome out;
  out.gain = dict_->MarginalGain(sample.z);
  const bool admit = dict_->full()
                         ? out.gain > dict_->gains()[dict_->EvictionIndex()]
                         : out.gain > threshold;
  if (!admit) return out;
  auto next = std::make_shared<LocalDictionary>(*dict_);
  out = AdmitSample(*next, sample, next_seq_, threshold);
  if (out.mutated()) {
    ++next_seq_;
    ++updates_;
    dict_ = std::move(next);
  }
  return out;
}

void FlatStore::Load(std::vector<LabeledSample> samples) {
  std::vector<std::uint64_t> seq(samples.size());
  std::iota(seq.begin(), seq.end(), next_seq_);
  next_seq_ += seq.size();
  dict_ = std::make_shared<LocalDictionary>(LocalDictionary::FromSamples(
      hyp_, dict_->capacity(), GainMode::kInverseDiagonal, std::move(samples),
      std::move(seq)));
}

int FlatCapacity(const RegionSpec& region, const LearnerConfig& config) {
  const std::int64_t cells = PartitionLattice(region).CellCount();
  return static_cast<int>(cells * config.capacity);
}

}  // namespace split
