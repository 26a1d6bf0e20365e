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

#ifndef SPLIT_RUN_LOG_H_
#define SPLIT_RUN_LOG_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "split/learner.h"
#include "split/scenario.h"

namespace split {

// First line of every step log; its column order is the schema.
const std::string& StepCsvHeader();

// Step records without wall-clock columns, so equal runs give equal files.
void WriteStepCsv(std::ostream& out, const std::vector<StepRecord>& steps);
// Throws SchemaError on a header mismatch or a malformed row.
std::vector<StepRecord> ReadStepCsv(std::istream& in);

// step,update_ns,eval_ns
void WriteTimingCsv(std::ostream& out, const std::vector<StepRecord>& steps);

std::string LapSummaryJson(const RunLog& log);

// Writes steps.csv, timing.csv and laps.json into `dir` (created if needed).
void WriteRunLog(const RunLog& log, const std::string& dir);
std::vector<StepRecord> LoadStepCsv(const std::string& path);

// Store file: a version line, then one "i j k z0 z1 z2 y0 y1 y2" line per
// sample, cells in lattice order and samples in dictionary slot order.
const std::string& StoreHeader();
void WriteStore(std::ostream& out, const StoreSnapshot& snapshot);
// Reads into `store`, replacing its contents. Throws SchemaError.
void ReadStore(std::istream& in, DictionaryStore* store);

}  // namespace split

#endif  // SPLIT_RUN_LOG_H_
