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

#include "split/run_log.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "split/errors.h"

namespace split {
namespace {

// Shortest text that reads back to the same double.
std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitFields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double ParseDouble(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("line " + std::to_string(line) + ": bad number '" + s +
                      "'");
  }
}

long long ParseInt(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("line " + std::to_string(line) + ": bad integer '" + s +
                      "'");
  }
}

}  // namespace

const std::string& StepCsvHeader() {
  static const std::string kHeader =
      "step,lap,time,x,y,yaw,vx,vy,yaw_rate,torque,steer,d_torque,d_steer,"
      "progress,progress_rate,lag_error,contour_error,z0,z1,z2,y0,y1,y2,"
      "mu0,mu1,mu2,var0,var1,var2,outcome,qp_iterations,degraded,"
      "store_size,nonempty_cells";
  return kHeader;
}

void WriteStepCsv(std::ostream& out, const std::vector<StepRecord>& steps) {
  out << StepCsvHeader() << '\n';
  for (const StepRecord& r : steps) {
    out << r.step << ',' << r.lap << ',' << Num(r.time);
    for (int i = 0; i < kStateDim; ++i) out << ',' << Num(r.state[i]);
    out << ',' << Num(r.input[0]) << ',' << Num(r.input[1]) << ','
        << Num(r.progress) << ',' << Num(r.progress_rate) << ','
        << Num(r.lag_error) << ',' << Num(r.contour_error);
    for (int i = 0; i < 3; ++i) out << ',' << Num(r.feature[i]);
    for (int i = 0; i < 3; ++i) out << ',' << Num(r.label[i]);
    for (int i = 0; i < 3; ++i) out << ',' << Num(r.prediction.mean[i]);
    for (int i = 0; i < 3; ++i) out << ',' << Num(r.prediction.variance[i]);
    out << ',' << r.outcome << ',' << r.qp_iterations << ','
        << (r.degraded ? 1 : 0) << ',' << r.store_size << ','
        << r.nonempty_cells << '\n';
  }
}

std::vector<StepRecord> ReadStepCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != StepCsvHeader()) {
    throw SchemaError("step log header does not match this version");
  }
  const std::size_t columns = SplitFields(StepCsvHeader(), ',').size();
  std::vector<StepRecord> steps;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitFields(line, ',');
    if (f.size() != columns) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " columns");
    }
    StepRecord r;
    int c = 0;
    auto d = [&] { return ParseDouble(f[c++], line_no); };
    auto i = [&] { return ParseInt(f[c++], line_no); };
    r.step = static_cast<int>(i());
    r.lap = static_cast<int>(i());
    r.time = d();
    for (int k = 0; k < kStateDim; ++k) r.state[k] = d();
    r.input[0] = d();
    r.input[1] = d();
    r.progress = d();
    r.progress_rate = d();
    r.lag_error = d();
    r.contour_error = d();
    for (int k = 0; k < 3; ++k) r.feature[k] = d();
    for (int k = 0; k < 3; ++k) r.label[k] = d();
    for (int k = 0; k < 3; ++k) r.prediction.mean[k] = d();
    for (int k = 0; k < 3; ++k) r.prediction.variance[k] = d();
    r.outcome = f[c++];
    r.qp_iterations = static_cast<int>(i());
    r.degraded = i() != 0;
    r.store_size = static_cast<std::size_t>(i());
    r.nonempty_cells = static_cast<std::size_t>(i());
    steps.push_back(std::move(r));
  }
  return steps;
}

void WriteTimingCsv(std::ostream& out, const std::vector<StepRecord>& steps) {
  out << "step,update_ns,eval_ns\n";
  for (const StepRecord& r : steps) {
    out << r.step << ',' << r.update_ns << ',' << r.eval_ns << '\n';
  }
}

std::string LapSummaryJson(const RunLog& log) {
  nlohmann::ordered_json root;
  root["schema"] = "split-laps v1";
  root["mode"] = log.mode;
  root["controller"] = log.controller;
  root["seed"] = log.seed;
  root["crashed"] = log.crashed;
  root["crash_reason"] = log.crash_reason;
  root["steps"] = log.steps.size();
  nlohmann::ordered_json laps = nlohmann::ordered_json::array();
  for (const LapSummary& s : log.laps) {
    laps.push_back({{"lap", s.lap},
                    {"completed", s.completed},
                    {"lap_time", s.lap_time},
                    {"steps", s.steps},
                    {"max_lateral_g", s.max_lateral_g},
                    {"lateral_rms", s.lateral_rms},
                    {"mean_speed", s.mean_speed},
                    {"training_set_size", s.training_set_size},
                    {"update_count", s.update_count},
                    {"nonempty_cells", s.nonempty_cells}});
  }
  root["laps"] = laps;
  return root.dump(2) + "\n";
}

void WriteRunLog(const RunLog& log, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ofstream steps(base / "steps.csv");
  WriteStepCsv(steps, log.steps);
  std::ofstream timing(base / "timing.csv");
  WriteTimingCsv(timing, log.steps);
  std::ofstream laps(base / "laps.json");
  laps << LapSummaryJson(log);
  if (!steps || !timing || !laps) {
    throw std::runtime_error("failed writing run log to " + dir);
  }
}

std::vector<StepRecord> LoadStepCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open step log: " + path);
  return ReadStepCsv(in);
}

const std::string& StoreHeader() {
  static const std::string kHeader = "# split-store v1";
  return kHeader;
}

void WriteStore(std::ostream& out, const StoreSnapshot& snapshot) {
  out << StoreHeader() << '\n';
  for (const auto& [cell, dict] : snapshot) {
    for (const LabeledSample& s : dict->samples()) {
      out << cell.i << ' ' << cell.j << ' ' << cell.k;
      for (int d = 0; d < 3; ++d) out << ' ' << Num(s.z[d]);
      for (int d = 0; d < 3; ++d) out << ' ' << Num(s.y[d]);
      out << '\n';
    }
  }
}

void ReadStore(std::istream& in, DictionaryStore* store) {
  std::string line;
  if (!std::getline(in, line) || line != StoreHeader()) {
    throw SchemaError("store file header does not match this version");
  }
  std::map<CellIndex, std::vector<LabeledSample>> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.size() != 9) {
      throw SchemaError("store line " + std::to_string(line_no) +
                        ": expected 9 fields");
    }
    const CellIndex cell{static_cast<int>(ParseInt(tokens[0], line_no)),
                         static_cast<int>(ParseInt(tokens[1], line_no)),
                         static_cast<int>(ParseInt(tokens[2], line_no))};
    LabeledSample s;
    for (int d = 0; d < 3; ++d) {
      s.z[d] = ParseDouble(tokens[3 + d], line_no);
      s.y[d] = ParseDouble(tokens[6 + d], line_no);
    }
    if (!(CellCoordinates(s.z, store->region()) == cell)) {
      throw SchemaError("store line " + std::to_string(line_no) +
                        ": feature does not lie in cell " + ToString(cell));
    }
    cells[cell].push_back(s);
  }
  store->Clear();
  for (auto& [cell, samples] : cells) store->Load(cell, std::move(samples));
}

}  // namespace split
