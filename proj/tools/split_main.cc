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

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "split/bench.h"
#include "split/config.h"
#include "split/errors.h"
#include "split/replay.h"
#include "split/run_log.h"
#include "split/scenario.h"
#include "split/validate.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kCrash = 2;
constexpr int kInvariantFailure = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> laps;
  std::string out = "out";
};

void AddCommon(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config, "scenario configuration (JSON)")
      ->required();
  cmd->add_option("--seed", f->seed, "random seed");
  cmd->add_option("--mode", f->mode, "nominal | split | iol")
      ->check(CLI::IsMember({"nominal", "split", "iol"}));
  cmd->add_option("--laps", f->laps, "laps to drive")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f->out, "output directory");
}

split::ScenarioConfig Load(const CommonFlags& f) {
  split::ScenarioConfig config = split::LoadScenarioConfig(f.config);
  if (f.seed) config.seed = *f.seed;
  if (f.mode) config.mode = split::ParseMode(*f.mode);
  if (f.laps) config.laps = *f.laps;
  config.Validate();
  return config;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int Simulate(const CommonFlags& f) {
  const split::ScenarioConfig config = Load(f);
  std::filesystem::create_directories(f.out);
  const split::RunOutput run = split::RunScenario(config);
  split::WriteRunLog(run.log, f.out);
  WriteFile(std::filesystem::path(f.out) / "config.json",
            split::DumpScenarioConfig(config));
  if (run.store) {
    std::ofstream store(std::filesystem::path(f.out) / "store.txt");
    split::WriteStore(store, run.store->Snapshot());
  }
  for (const split::LapSummary& lap : run.log.laps) {
    std::printf("lap %d %s time %.3f s  max |a_y| %.2f g  set %zu  cells %zu\n",
                lap.lap, lap.completed ? "done" : "open", lap.lap_time,
                lap.max_lateral_g, lap.training_set_size, lap.nonempty_cells);
  }
  if (run.log.crashed) {
    std::fprintf(stderr, "crash: %s\n", run.log.crash_reason.c_str());
    return kCrash;
  }
  return kOk;
}

int Replay(const CommonFlags& f, const std::string& log, int train_lap,
           bool ablation) {
  const split::ScenarioConfig config = Load(f);
  const std::vector<split::StepRecord> steps = split::LoadStepCsv(log);
  split::ReplayOptions options;
  options.train_lap = train_lap;
  options.ablation = ablation;
  split::DictionaryStore store(config.hyperparameters, config.region,
                               config.learner, config.vehicle, config.tires);
  const split::ReplayReport report =
      split::Replay(steps, config, options, &store);
  std::filesystem::create_directories(f.out);
  const std::string json = split::ReplayReportJson(report);
  WriteFile(std::filesystem::path(f.out) / "replay.json", json);
  std::ofstream file(std::filesystem::path(f.out) / "store.txt");
  split::WriteStore(file, store.Snapshot());
  std::fputs(json.c_str(), stdout);
  return kOk;
}

int Bench(const CommonFlags& f) {
  const split::ScenarioConfig config = Load(f);
  split::BenchOptions options;
  options.seed = config.seed;
  const split::BenchReport report = split::RunBench(config, options);
  std::filesystem::create_directories(f.out);
  const std::string csv = split::BenchCsv(report);
  WriteFile(std::filesystem::path(f.out) / "bench.csv", csv);
  WriteFile(std::filesystem::path(f.out) / "bench.json",
            split::BenchJson(report));
  std::fputs(csv.c_str(), stdout);
  std::printf("split update ratio %.2f  bcm R2 %.4f  full/bcm %.1f\n",
              report.split_update_ratio, report.bcm_linear_r2,
              report.full_gp_over_bcm);
  return kOk;
}

int Validate(const CommonFlags& f, bool corrupt) {
  const split::ScenarioConfig config = Load(f);
  split::ValidateOptions options;
  options.inject_cache_corruption = corrupt;
  const auto results = split::RunInvariantSuite(config, options);
  for (const split::InvariantResult& r : results) {
    std::printf("%s %-36s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
  }
  std::filesystem::create_directories(f.out);
  WriteFile(std::filesystem::path(f.out) / "validate.json",
            split::InvariantReportJson(results));
  return split::AllPassed(results) ? kOk : kInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPLIT learning-based vehicle control harness"};
  app.require_subcommand(1);

  CommonFlags simulate_flags, replay_flags, bench_flags, validate_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop laps");
  AddCommon(simulate, &simulate_flags);

  CLI::App* replay = app.add_subcommand("replay", "offline learning from a log");
  AddCommon(replay, &replay_flags);
  std::string log;
  int train_lap = 1;
  bool no_ablation = false;
  replay->add_option("--log", log, "steps.csv of a previous run")->required();
  replay->add_option("--train-lap", train_lap, "lap used for training");
  replay->add_flag("--no-ablation", no_ablation, "skip the feature ablation");

  CLI::App* bench = app.add_subcommand("bench", "timing sweep");
  AddCommon(bench, &bench_flags);

  CLI::App* validate = app.add_subcommand("validate", "invariant suite");
  AddCommon(validate, &validate_flags);
  bool corrupt = false;
  validate->add_flag("--inject-corruption", corrupt,
                     "corrupt one cached entry first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) return Simulate(simulate_flags);
    if (*replay) return Replay(replay_flags, log, train_lap, !no_ablation);
    if (*bench) return Bench(bench_flags);
    if (*validate) return Validate(validate_flags, corrupt);
  } catch (const split::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const split::SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCrash;
  }
  return kOk;
}
