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

#include "split/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "split/bcm.h"
#include "split/errors.h"
#include "split/learner.h"
#include "split/region.h"

namespace split {
namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double TimeNs(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
}

// Uniform point in `cell` that passes the validity check, or false.
bool SampleInCell(const CellIndex& cell, const ScenarioConfig& config,
                  std::mt19937_64& rng, Feature* z) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Vector3d& e = config.region.cell_edges;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Feature c((cell.i + u(rng)) * e[0], (cell.j + u(rng)) * e[1],
                    (cell.k + u(rng)) * e[2]);
    if (CheckValidity(c, config.vehicle, config.tires, config.region).ok() &&
        CellCoordinates(c, config.region) == cell) {
      *z = c;
      return true;
    }
  }
  return false;
}

Eigen::Vector3d SyntheticLabel(const Feature& z, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 0.01);
  return {0.05 * std::sin(20.0 * z[0]) + noise(rng),
          0.1 * std::sin(15.0 * z[1]) * z[2] + noise(rng),
          0.05 * std::cos(10.0 * (z[0] - z[1])) + noise(rng)};
}

std::vector<CellIndex> ValidCells(const ScenarioConfig& config,
                                  std::mt19937_64& rng) {
  const Lattice lattice = PartitionLattice(config.region);
  std::vector<CellIndex> cells;
  Feature z;
  for (int i = lattice.lo.i; i <= lattice.hi.i; ++i) {
    for (int j = lattice.lo.j; j <= lattice.hi.j; ++j) {
      for (int k = lattice.lo.k; k <= lattice.hi.k; ++k) {
        const CellIndex c{i, j, k};
        if (SampleInCell(c, config, rng, &z)) cells.push_back(c);
      }
    }
  }
  std::shuffle(cells.begin(), cells.end(), rng);
  return cells;
}

}  // namespace

TimingStats Summarize(std::vector<double> ns) {
  TimingStats s;
  s.samples = static_cast<int>(ns.size());
  if (ns.empty()) return s;
  std::sort(ns.begin(), ns.end());
  const std::size_t n = ns.size();
  s.median_ns = n % 2 ? ns[n / 2] : 0.5 * (ns[n / 2 - 1] + ns[n / 2]);
  const std::size_t p99 = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(n))) - 1;
  s.p99_ns = ns[std::min(p99, n - 1)];
  return s;
}

double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

BenchReport RunBench(const ScenarioConfig& config, const BenchOptions& options) {
  const int m = config.learner.capacity;
  std::mt19937_64 rng(options.seed);
  const std::vector<CellIndex> pool = ValidCells(config, rng);
  BenchReport report;
  for (int size : options.sizes) {
    const int cells = size / m;
    if (size <= 0 || size % m != 0) {
      throw ConfigError("bench sizes must be positive multiples of capacity");
    }
    if (cells > static_cast<int>(pool.size())) {
      throw ConfigError("bench size " + std::to_string(size) +
                        " exceeds the valid cells of the partition");
    }
    DictionaryStore store(config.hyperparameters, config.region,
                          config.learner, config.vehicle, config.tires);
    std::vector<LabeledSample> all;
    std::vector<std::vector<LabeledSample>> contents;
    for (int c = 0; c < cells; ++c) {
      std::vector<LabeledSample> samples;
      Feature z;
      for (int s = 0; s < m; ++s) {
        SampleInCell(pool[c], config, rng, &z);
        samples.push_back({z, SyntheticLabel(z, rng)});
      }
      all.insert(all.end(), samples.begin(), samples.end());
      contents.push_back(samples);
      store.Load(pool[c], std::move(samples));
    }

    BenchRow row;
    row.total_samples = size;
    row.nonempty_cells = store.nonempty_cells();
    std::uniform_int_distribution<int> pick(0, cells - 1);
    constexpr double kSpeed = 10.0;

    std::vector<double> ns;
    Feature z;
    // Every update starts from the initial cell contents.
    for (int r = 0; r < options.update_reps; ++r) {
      const int c = pick(rng);
      SampleInCell(pool[c], config, rng, &z);
      const LabeledSample sample{z, SyntheticLabel(z, rng)};
      ns.push_back(TimeNs([&] { store.TryInsert(sample, kSpeed); }));
      store.Load(pool[c], contents[c]);
    }
    row.split_update = Summarize(ns);

    if (options.iol) {
      FlatStore flat(config.hyperparameters, config.region, config.learner,
                     config.vehicle, config.tires,
                     FlatCapacity(config.region, config.learner));
      flat.Load(all);
      ns.clear();
      for (int r = 0; r < options.iol_reps; ++r) {
        SampleInCell(pool[pick(rng)], config, rng, &z);
        const LabeledSample sample{z, SyntheticLabel(z, rng)};
        ns.push_back(TimeNs([&] { flat.TryInsert(sample, kSpeed); }));
      }
      row.iol_update = Summarize(ns);
    }

    const StoreSnapshot snapshot = store.Snapshot();
    ns.clear();
    for (int r = 0; r < options.eval_reps; ++r) {
      SampleInCell(pool[pick(rng)], config, rng, &z);
      ns.push_back(TimeNs([&] {
        BcmPredict(snapshot, z, config.hyperparameters, config.region, {});
      }));
    }
    row.bcm_eval = Summarize(ns);

    if (options.full_gp) {
      ns.clear();
      for (int r = 0; r < options.full_gp_reps; ++r) {
        SampleInCell(pool[pick(rng)], config, rng, &z);
        ns.push_back(TimeNs([&] {
          FullGpPredict(snapshot, z, config.hyperparameters);
        }));
      }
      row.full_gp_eval = Summarize(ns);
    }
    report.rows.push_back(row);
  }

  if (!report.rows.empty()) {
    const BenchRow& first = report.rows.front();
    const BenchRow& last = report.rows.back();
    report.split_update_ratio =
        last.split_update.median_ns / first.split_update.median_ns;
    if (last.full_gp_eval.samples > 0) {
      report.full_gp_over_bcm =
          last.full_gp_eval.median_ns / last.bcm_eval.median_ns;
    }
    std::vector<double> x, y;
    for (const BenchRow& row : report.rows) {
      x.push_back(static_cast<double>(row.nonempty_cells));
      y.push_back(row.bcm_eval.median_ns);
      if (row.total_samples == 1000 && row.iol_update.samples > 0) {
        report.iol_over_split_at_1000 =
            row.iol_update.median_ns / row.split_update.median_ns;
      }
    }
    report.bcm_linear_r2 = LinearFitR2(x, y);
  }
  return report;
}

std::string BenchCsv(const BenchReport& report) {
  std::ostringstream out;
  out << "total_samples,nonempty_cells,split_update_median_ns,"
         "split_update_p99_ns,iol_update_median_ns,iol_update_p99_ns,"
         "bcm_eval_median_ns,bcm_eval_p99_ns,full_gp_median_ns,"
         "full_gp_p99_ns\n";
  for (const BenchRow& r : report.rows) {
    out << r.total_samples << ',' << r.nonempty_cells << ','
        << r.split_update.median_ns << ',' << r.split_update.p99_ns << ','
        << r.iol_update.median_ns << ',' << r.iol_update.p99_ns << ','
        << r.bcm_eval.median_ns << ',' << r.bcm_eval.p99_ns << ','
        << r.full_gp_eval.median_ns << ',' << r.full_gp_eval.p99_ns << '\n';
  }
  return out.str();
}

std::string BenchJson(const BenchReport& report) {
  auto stats = [](const TimingStats& s) {
    return nlohmann::ordered_json{{"median_ns", s.median_ns},
                                  {"p99_ns", s.p99_ns},
                                  {"samples", s.samples}};
  };
  nlohmann::ordered_json root;
  root["schema"] = "split-bench v1";
  root["rows"] = nlohmann::ordered_json::array();
  for (const BenchRow& r : report.rows) {
    root["rows"].push_back({{"total_samples", r.total_samples},
                            {"nonempty_cells", r.nonempty_cells},
                            {"split_update", stats(r.split_update)},
                            {"iol_update", stats(r.iol_update)},
                            {"bcm_eval", stats(r.bcm_eval)},
                            {"full_gp_eval", stats(r.full_gp_eval)}});
  }
  root["split_update_ratio"] = report.split_update_ratio;
  root["bcm_linear_r2"] = report.bcm_linear_r2;
  root["full_gp_over_bcm"] = report.full_gp_over_bcm;
  root["iol_over_split_at_1000"] = report.iol_over_split_at_1000;
  return root.dump(2) + "\n";
}

}  // namespace split
