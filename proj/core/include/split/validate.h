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

#ifndef SPLIT_VALIDATE_H_
#define SPLIT_VALIDATE_H_

#include <string>
#include <vector>

#include "split/config.h"

namespace split {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidateOptions {
  // Corrupts one cached entry before the scratch-equivalence check.
  bool inject_cache_corruption = false;
  // Includes the short closed-loop log checks.
  bool closed_loop = true;
};

// Randomized invariant suite over every module, seeded from config.seed.
std::vector<InvariantResult> RunInvariantSuite(const ScenarioConfig& config,
                                               const ValidateOptions& options);

bool AllPassed(const std::vector<InvariantResult>& results);
std::string InvariantReportJson(const std::vector<InvariantResult>& results);

}  // namespace split

#endif  // SPLIT_VALIDATE_H_
