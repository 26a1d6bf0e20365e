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

#ifndef SPLIT_BENCH_H_
#define SPLIT_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "split/config.h"

namespace split {

struct BenchOptions {
  std::vector<int> sizes{100, 250, 500, 1000, 2000};  // total samples
  std::uint64_t seed = 1;
  int update_reps = 200;
  int eval_reps = 200;
  int iol_reps = 5;
  int full_gp_reps = 3;
  bool iol = true;
  bool full_gp = true;
};

struct TimingStats {
  double median_ns = 0.0;
  double p99_ns = 0.0;
  int samples = 0;
};

struct BenchRow {
  int total_samples = 0;
  std::size_t nonempty_cells = 0;
  TimingStats split_update;
  TimingStats iol_update;   // samples == 0 when skipped
  TimingStats bcm_eval;
  TimingStats full_gp_eval;  // samples == 0 when skipped
};

struct BenchReport {
  std::vector<BenchRow> rows;
  // median update at the largest size / at the smallest.
  double split_update_ratio = 0.0;
  // R^2 of a least-squares line through (non-empty cells, BCM median).
  double bcm_linear_r2 = 0.0;
  // Full-GP median / BCM median at the largest size.
  double full_gp_over_bcm = 0.0;
  // IOL median / SPLIT median at 1000 samples (0 when not measured).
  double iol_over_split_at_1000 = 0.0;
};

TimingStats Summarize(std::vector<double> ns);
double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y);

// Fills size / M cells with M valid random samples each, then times
// single-cell updates, undivided-set updates, committee evaluation with every
// cell taking part, and the exact GP over the union.
BenchReport RunBench(const ScenarioConfig& config, const BenchOptions& options);

std::string BenchCsv(const BenchReport& report);
std::string BenchJson(const BenchReport& report);

}  // namespace split

#endif  // SPLIT_BENCH_H_
