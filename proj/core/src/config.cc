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

#include "split/config.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "split/errors.h"

namespace split {
namespace {

using Json = nlohmann::ordered_json;

// Strict reader over one JSON object: every key must be consumed.
class Block {
 public:
  Block(const Json& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool Has(const char* key) const { return node_.contains(key); }

  template <typename T>
  void Get(const char* key, T* out) {
    if (!node_.contains(key)) return;
    used_.insert(key);
    const Json& v = node_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw ConfigError("");
        if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer()) throw ConfigError("");
        }
      } else {
        if (!v.is_string()) throw ConfigError("");
      }
      *out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  template <typename Derived>
  void GetVector(const char* key, Eigen::MatrixBase<Derived>* out) {
    if (!node_.contains(key)) return;
    used_.insert(key);
    const Json& v = node_.at(key);
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != out->size()) {
      throw ConfigError(path_ + "." + key + " must be an array of " +
                        std::to_string(out->size()) + " numbers");
    }
    for (Eigen::Index i = 0; i < out->size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(path_ + "." + key + " must hold numbers");
      }
      (*out)[i] = v[i].get<double>();
    }
  }

  std::optional<Block> Child(const char* key) {
    if (!node_.contains(key)) return std::nullopt;
    used_.insert(key);
    return Block(node_.at(key), path_ + "." + key);
  }

  void Finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!used_.count(key)) {
        throw ConfigError("unknown key " + path_ + "." + key);
      }
    }
  }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> used_;
};

void ReadVehicle(Block b, VehicleParams* v) {
  b.Get("mass", &v->mass);
  b.Get("yaw_inertia", &v->yaw_inertia);
  b.Get("lf", &v->lf);
  b.Get("lr", &v->lr);
  b.Get("drag_coefficient", &v->drag_coeff);
  b.Get("torque_split", &v->torque_split);
  b.Get("wheel_radius", &v->wheel_radius);
  b.Get("front_rolling_resistance", &v->front_rolling_resistance);
  b.Get("rear_rolling_resistance", &v->rear_rolling_resistance);
  b.Get("min_speed", &v->min_speed);
  b.Get("integration_substeps", &v->integration_substeps);
  b.Get("max_torque", &v->max_torque);
  b.Get("max_steer", &v->max_steer);
  b.Get("max_torque_rate", &v->max_torque_rate);
  b.Get("max_steer_rate", &v->max_steer_rate);
  b.Finish();
}

void ReadTires(Block b, TireParams* t) {
  b.Get("b_front", &t->b_front);
  b.Get("c_front", &t->c_front);
  b.Get("d_front", &t->d_front);
  b.Get("b_rear", &t->b_rear);
  b.Get("c_rear", &t->c_rear);
  b.Get("d_rear", &t->d_rear);
  b.Finish();
}

void ReadPerturbation(Block b, PlantPerturbation* p) {
  b.Get("mu_scale", &p->mu_scale);
  b.Get("b_scale", &p->b_scale);
  b.Get("c_scale", &p->c_scale);
  b.Get("coupling_on", &p->coupling_on);
  b.Get("torque_gain", &p->torque_gain);
  b.GetVector("measurement_noise", &p->measurement_noise);
  b.Finish();
}

void ReadHyperparams(Block b, Hyperparams* h) {
  b.GetVector("length_scales", &h->length_scales);
  b.GetVector("signal_variance", &h->signal_variance);
  b.GetVector("noise_variance", &h->noise_variance);
  b.Get("jitter_ratio", &h->jitter_ratio);
  b.Finish();
}

void ReadRegion(Block b, RegionSpec* r) {
  b.Get("alpha_max", &r->alpha_max);
  b.Get("alpha_diff_max", &r->alpha_diff_max);
  b.Get("p_long", &r->p_long);
  b.Get("p_ellipse", &r->p_ellipse);
  b.GetVector("cell_edges", &r->cell_edges);
  b.Finish();
}

void ReadLearner(Block b, LearnerConfig* l) {
  b.Get("capacity", &l->capacity);
  b.Get("gain_threshold_ratio", &l->gain_threshold_ratio);
  b.Get("speed_gate", &l->speed_gate);
  b.Finish();
}

void ReadQp(Block b, QpSettings* q) {
  b.Get("max_iterations", &q->max_iterations);
  b.Get("tolerance", &q->tolerance);
  b.Get("regularization", &q->regularization);
  b.Get("refinement_steps", &q->refinement_steps);
  b.Finish();
}

void ReadMpc(Block b, MpcConfig* m, double* reference_speed) {
  b.Get("horizon", &m->horizon);
  b.Get("dt", &m->dt);
  b.GetVector("q", &m->q);
  b.GetVector("r", &m->r);
  b.GetVector("p", &m->p);
  b.Get("q_lateral", &m->q_lateral);
  b.Get("sqp_iterations", &m->sqp_iterations);
  b.Get("reference_speed", reference_speed);
  if (auto q = b.Child("qp")) ReadQp(*q, &m->qp);
  b.Finish();
}

void ReadMpcc(Block b, MpccConfig* m) {
  b.Get("horizon", &m->horizon);
  b.Get("dt", &m->dt);
  b.Get("q_lag", &m->q_lag);
  b.Get("q_contour", &m->q_contour);
  b.Get("q_progress", &m->q_progress);
  b.GetVector("r_input", &m->r_input);
  b.Get("r_progress_change", &m->r_progress_change);
  b.Get("max_progress_rate", &m->max_progress_rate);
  b.Get("speed_cap", &m->speed_cap);
  b.Get("slack_linear", &m->slack_linear);
  b.Get("slack_quadratic", &m->slack_quadratic);
  b.Get("sqp_iterations", &m->sqp_iterations);
  b.Get("proximal", &m->proximal);
  if (auto q = b.Child("qp")) ReadQp(*q, &m->qp);
  b.Finish();
}

void ReadController(Block b, ControllerConfig* c) {
  std::string kind(ControllerName(c->kind));
  b.Get("type", &kind);
  if (kind == "mpcc") {
    c->kind = ControllerKind::kMpcc;
  } else if (kind == "mpc") {
    c->kind = ControllerKind::kMpc;
  } else {
    throw ConfigError("controller.type must be mpc or mpcc");
  }
  if (auto m = b.Child("mpc")) ReadMpc(*m, &c->mpc, &c->reference_speed);
  if (auto m = b.Child("mpcc")) ReadMpcc(*m, &c->mpcc);
  if (auto m = b.Child("bcm")) {
    int radius = c->bcm.neighborhood_radius.value_or(-1);
    m->Get("neighborhood_radius", &radius);
    c->bcm.neighborhood_radius =
        radius >= 0 ? std::optional<int>(radius) : std::nullopt;
    m->Get("clamp_negative_precision", &c->bcm.clamp_negative_precision);
    m->Finish();
  }
  b.Finish();
}

void ReadTrack(Block b, TrackConfig* t) {
  b.Get("file", &t->file);
  b.Get("tube_radius", &t->tube_radius);
  b.Get("crash_margin", &t->crash_margin);
  b.Get("spacing", &t->spacing);
  b.Finish();
}

void ReadSimulation(Block b, SimulationConfig* s) {
  b.Get("dt", &s->dt);
  b.Get("start_speed", &s->start_speed);
  b.Get("max_steps_per_lap", &s->max_steps_per_lap);
  b.Get("iol_time_scale", &s->iol_time_scale);
  b.Finish();
}

template <typename Derived>
Json ToJson(const Eigen::MatrixBase<Derived>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json QpJson(const QpSettings& q) {
  return {{"max_iterations", q.max_iterations},
          {"tolerance", q.tolerance},
          {"regularization", q.regularization},
          {"refinement_steps", q.refinement_steps}};
}

}  // namespace

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kNominal:
      return "nominal";
    case Mode::kSplit:
      return "split";
    case Mode::kIol:
      return "iol";
  }
  return "unknown";
}

Mode ParseMode(std::string_view name) {
  if (name == "nominal") return Mode::kNominal;
  if (name == "split") return Mode::kSplit;
  if (name == "iol") return Mode::kIol;
  throw ConfigError("mode must be nominal, split or iol, got '" +
                    std::string(name) + "'");
}

std::string_view ControllerName(ControllerKind kind) {
  return kind == ControllerKind::kMpc ? "mpc" : "mpcc";
}

void ScenarioConfig::Validate() const {
  vehicle.Validate();
  tires.Validate();
  perturbation.Validate();
  hyperparameters.Validate();
  region.Validate();
  learner.Validate();
  controller.mpc.Validate();
  controller.mpcc.Validate();
  if (controller.bcm.neighborhood_radius &&
      *controller.bcm.neighborhood_radius < 0) {
    throw ConfigError("controller.bcm.neighborhood_radius must be >= 0");
  }
  if (!(controller.reference_speed > vehicle.min_speed)) {
    throw ConfigError("controller.mpc.reference_speed must exceed min_speed");
  }
  if (track.file.empty()) throw ConfigError("track.file is required");
  if (!std::filesystem::exists(track.file)) {
    throw ConfigError("track file not found: " + track.file);
  }
  if (!(track.tube_radius > 0.0) || !(track.crash_margin >= 0.0) ||
      !(track.spacing > 0.0)) {
    throw ConfigError("track.tube_radius/crash_margin/spacing out of range");
  }
  if (!(simulation.dt > 0.0)) throw ConfigError("simulation.dt must be > 0");
  const double controller_dt = controller.kind == ControllerKind::kMpc
                                   ? controller.mpc.dt
                                   : controller.mpcc.dt;
  if (controller_dt != simulation.dt) {
    throw ConfigError("controller dt must equal simulation.dt");
  }
  if (!(simulation.start_speed > vehicle.min_speed)) {
    throw ConfigError("simulation.start_speed must exceed min_speed");
  }
  if (simulation.max_steps_per_lap < 1) {
    throw ConfigError("simulation.max_steps_per_lap must be >= 1");
  }
  if (!(simulation.iol_time_scale >= 0.0)) {
    throw ConfigError("simulation.iol_time_scale must be >= 0");
  }
  if (laps < 1) throw ConfigError("laps must be >= 1");
}

ScenarioConfig DefaultScenarioConfig() {
  ScenarioConfig c;
  c.controller.bcm.neighborhood_radius = 2;
  return c;
}

ScenarioConfig ParseScenarioConfig(std::string_view text,
                                   const std::string& base_dir) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig c = DefaultScenarioConfig();
  Block b(root, "config");
  if (auto v = b.Child("vehicle")) ReadVehicle(*v, &c.vehicle);
  if (auto v = b.Child("tire")) ReadTires(*v, &c.tires);
  if (auto v = b.Child("perturbation")) ReadPerturbation(*v, &c.perturbation);
  if (auto v = b.Child("hyperparameters")) {
    ReadHyperparams(*v, &c.hyperparameters);
  }
  if (auto v = b.Child("region")) ReadRegion(*v, &c.region);
  if (auto v = b.Child("learner")) ReadLearner(*v, &c.learner);
  if (auto v = b.Child("controller")) ReadController(*v, &c.controller);
  if (auto v = b.Child("track")) ReadTrack(*v, &c.track);
  if (auto v = b.Child("simulation")) ReadSimulation(*v, &c.simulation);
  b.Get("laps", &c.laps);
  b.Get("seed", &c.seed);
  std::string mode(ModeName(c.mode));
  b.Get("mode", &mode);
  c.mode = ParseMode(mode);
  b.Finish();

  c.controller.mpcc.region = c.region;
  c.controller.mpcc.tube_radius = c.track.tube_radius;
  if (!c.track.file.empty() &&
      std::filesystem::path(c.track.file).is_relative()) {
    c.track.file = (std::filesystem::path(base_dir) / c.track.file).string();
  }
  c.Validate();
  return c;
}

ScenarioConfig LoadScenarioConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string dir =
      std::filesystem::absolute(path).parent_path().string();
  return ParseScenarioConfig(buffer.str(), dir);
}

std::string DumpScenarioConfig(const ScenarioConfig& c) {
  const VehicleParams& v = c.vehicle;
  const TireParams& t = c.tires;
  const PlantPerturbation& p = c.perturbation;
  const Hyperparams& h = c.hyperparameters;
  const RegionSpec& r = c.region;
  const MpcConfig& mpc = c.controller.mpc;
  const MpccConfig& mpcc = c.controller.mpcc;
  Json root;
  root["vehicle"] = {{"mass", v.mass},
                     {"yaw_inertia", v.yaw_inertia},
                     {"lf", v.lf},
                     {"lr", v.lr},
                     {"drag_coefficient", v.drag_coeff},
                     {"torque_split", v.torque_split},
                     {"wheel_radius", v.wheel_radius},
                     {"front_rolling_resistance", v.front_rolling_resistance},
                     {"rear_rolling_resistance", v.rear_rolling_resistance},
                     {"min_speed", v.min_speed},
                     {"integration_substeps", v.integration_substeps},
                     {"max_torque", v.max_torque},
                     {"max_steer", v.max_steer},
                     {"max_torque_rate", v.max_torque_rate},
                     {"max_steer_rate", v.max_steer_rate}};
  root["tire"] = {{"b_front", t.b_front}, {"c_front", t.c_front},
                  {"d_front", t.d_front}, {"b_rear", t.b_rear},
                  {"c_rear", t.c_rear},   {"d_rear", t.d_rear}};
  root["perturbation"] = {{"mu_scale", p.mu_scale},
                          {"b_scale", p.b_scale},
                          {"c_scale", p.c_scale},
                          {"coupling_on", p.coupling_on},
                          {"torque_gain", p.torque_gain},
                          {"measurement_noise", ToJson(p.measurement_noise)}};
  root["hyperparameters"] = {{"length_scales", ToJson(h.length_scales)},
                             {"signal_variance", ToJson(h.signal_variance)},
                             {"noise_variance", ToJson(h.noise_variance)},
                             {"jitter_ratio", h.jitter_ratio}};
  root["region"] = {{"alpha_max", r.alpha_max},
                    {"alpha_diff_max", r.alpha_diff_max},
                    {"p_long", r.p_long},
                    {"p_ellipse", r.p_ellipse},
                    {"cell_edges", ToJson(r.cell_edges)}};
  root["learner"] = {{"capacity", c.learner.capacity},
                     {"gain_threshold_ratio", c.learner.gain_threshold_ratio},
                     {"speed_gate", c.learner.speed_gate}};
  Json controller;
  controller["type"] = std::string(ControllerName(c.controller.kind));
  controller["mpc"] = {{"horizon", mpc.horizon},
                       {"dt", mpc.dt},
                       {"q", ToJson(mpc.q)},
                       {"r", ToJson(mpc.r)},
                       {"p", ToJson(mpc.p)},
                       {"q_lateral", mpc.q_lateral},
                       {"sqp_iterations", mpc.sqp_iterations},
                       {"reference_speed", c.controller.reference_speed},
                       {"qp", QpJson(mpc.qp)}};
  controller["mpcc"] = {{"horizon", mpcc.horizon},
                        {"dt", mpcc.dt},
                        {"q_lag", mpcc.q_lag},
                        {"q_contour", mpcc.q_contour},
                        {"q_progress", mpcc.q_progress},
                        {"r_input", ToJson(mpcc.r_input)},
                        {"r_progress_change", mpcc.r_progress_change},
                        {"max_progress_rate", mpcc.max_progress_rate},
                        {"speed_cap", mpcc.speed_cap},
                        {"slack_linear", mpcc.slack_linear},
                        {"slack_quadratic", mpcc.slack_quadratic},
                        {"sqp_iterations", mpcc.sqp_iterations},
                        {"proximal", mpcc.proximal},
                        {"qp", QpJson(mpcc.qp)}};
  controller["bcm"] = {
      {"neighborhood_radius", c.controller.bcm.neighborhood_radius.value_or(-1)},
      {"clamp_negative_precision", c.controller.bcm.clamp_negative_precision}};
  root["controller"] = controller;
  root["track"] = {{"file", c.track.file},
                   {"tube_radius", c.track.tube_radius},
                   {"crash_margin", c.track.crash_margin},
                   {"spacing", c.track.spacing}};
  root["simulation"] = {{"dt", c.simulation.dt},
                        {"start_speed", c.simulation.start_speed},
                        {"max_steps_per_lap", c.simulation.max_steps_per_lap},
                        {"iol_time_scale", c.simulation.iol_time_scale}};
  root["laps"] = c.laps;
  root["seed"] = c.seed;
  root["mode"] = std::string(ModeName(c.mode));
  return root.dump(2) + "\n";
}

}  // namespace split
