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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "qp_builder.h"
#include "split/control.h"
#include "split/errors.h"

namespace split {
namespace {

constexpr double kTorqueScale = 1e-3;
constexpr int kMeasures = 6;

using Measures = Eigen::Matrix<double, kMeasures, 1>;
using MeasureJacobian = Eigen::Matrix<double, kMeasures, 8>;

StateVector StateScale() {
  StateVector s = StateVector::Ones();
  s[kTorque] = kTorqueScale;
  return s;
}

InputVector InputScale() { return {kTorqueScale, 1.0}; }

// Region limits in normalized form, each bounded by 1: slip angles,
// slip difference (all symmetric), tire ellipses and the speed cap (upper).
Measures RegionMeasures(const StateVector& x, const VehicleParams& vehicle,
                        const TireParams& tires, const MpccConfig& cfg) {
  const Eigen::Vector3d z = SlipTorqueFeature(x, vehicle);
  const RegionSpec& spec = cfg.region;
  const LongitudinalForcePair fx =
      LongitudinalForces(z[2] * vehicle.max_torque, vehicle);
  const double fy_f = TireLateralForce(z[0], Axle::kFront, tires);
  const double fy_r = TireLateralForce(z[1], Axle::kRear, tires);
  auto ellipse = [&](double f_long, double f_lat, double peak) {
    return (std::pow(spec.p_long * f_long, 2) + f_lat * f_lat) /
           std::pow(spec.p_ellipse * peak, 2);
  };
  Measures m;
  m << z[0] / spec.alpha_max, z[1] / spec.alpha_max,
      (z[0] + z[1]) / spec.alpha_diff_max,
      ellipse(fx.front, fy_f, tires.d_front),
      ellipse(fx.rear, fy_r, tires.d_rear), x[kVx] / cfg.speed_cap;
  return m;
}

constexpr std::array<bool, kMeasures> kSymmetric = {true,  true,  true,
                                                    false, false, false};

double RegionExcess(const Measures& m) {
  double worst = 0.0;
  for (int i = 0; i < kMeasures; ++i) {
    const double v = kSymmetric[i] ? std::abs(m[i]) : m[i];
    worst = std::max(worst, v - 1.0);
  }
  return worst;
}

MeasureJacobian RegionJacobian(const StateVector& x,
                               const VehicleParams& vehicle,
                               const TireParams& tires,
                               const MpccConfig& cfg) {
  MeasureJacobian jac = MeasureJacobian::Zero();
  for (int j : {kVx, kVy, kYawRate, kTorque, kSteer}) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    StateVector plus = x, minus = x;
    plus[j] += h;
    minus[j] -= h;
    jac.col(j) = (RegionMeasures(plus, vehicle, tires, cfg) -
                  RegionMeasures(minus, vehicle, tires, cfg)) /
                 (plus[j] - minus[j]);
  }
  return jac;
}

// Any stopping reason is fine once the returned point satisfies the KKT
// conditions to the controller's tolerance.
bool Acceptable(const QpSolution& sol) {
  return sol.x.allFinite() && sol.kkt_residual < 1e-6;
}

}  // namespace

void MpccConfig::Validate() const {
  if (horizon < 1) throw ConfigError("mpcc.horizon must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("mpcc.dt must be > 0");
  if (!(q_lag > 0.0 && q_contour > 0.0 && q_progress > 0.0)) {
    throw ConfigError("mpcc.q_lag, q_contour, q_progress must be > 0");
  }
  if (!(r_input.array() > 0.0).all()) {
    throw ConfigError("mpcc.r_input must be > 0");
  }
  if (!(r_progress_change >= 0.0)) {
    throw ConfigError("mpcc.r_progress_change must be >= 0");
  }
  if (!(tube_radius > 0.0)) throw ConfigError("mpcc.tube_radius must be > 0");
  if (!(max_progress_rate > 0.0 && speed_cap > 0.0)) {
    throw ConfigError("mpcc speed limits must be > 0");
  }
  if (!(slack_linear >= 0.0 && slack_quadratic > 0.0)) {
    throw ConfigError("mpcc slack weights must be positive");
  }
  if (sqp_iterations < 1 || sqp_iterations > 3) {
    throw ConfigError("mpcc.sqp_iterations must lie in [1, 3]");
  }
  if (!(proximal >= 0.0)) throw ConfigError("mpcc.proximal must be >= 0");
  region.Validate();
}

struct MpccController::Rollout {
  std::vector<StateVector> states;
  std::vector<double> progress;
  double merit = std::numeric_limits<double>::infinity();
  bool ok = false;
  std::string error;
};

MpccController::MpccController(MpccConfig config, VehicleParams vehicle,
                               TireParams tires, const Track& track)
    : config_(std::move(config)),
      vehicle_(vehicle),
      tires_(tires),
      track_(track) {
  config_.Validate();
}

MpccController::Rollout MpccController::Simulate(
    const StateVector& state, double theta,
    const std::vector<InputVector>& inputs, const std::vector<double>& rates,
    const ResidualModel& model) const {
  const int h = config_.horizon;
  const double dt = config_.dt;
  Rollout out;
  out.states.resize(h + 1);
  out.progress.resize(h + 1);
  out.states[0] = state;
  out.progress[0] = theta;
  double merit = 0.0;
  try {
    for (int k = 0; k < h; ++k) {
      out.states[k + 1] =
          HybridStep(out.states[k], inputs[k], dt, vehicle_, tires_, model);
      out.progress[k + 1] = out.progress[k] + dt * rates[k];
      const StateVector& x = out.states[k + 1];
      const LagContour e =
          LagContourErrors(x[kPosX], x[kPosY], out.progress[k + 1], track_);
      const double tube =
          std::max(0.0, std::abs(e.contour) - config_.tube_radius);
      const double region = std::max(
          0.0, RegionExcess(RegionMeasures(x, vehicle_, tires_, config_)));
      merit += config_.q_contour * e.contour * e.contour +
               config_.q_lag * e.lag * e.lag - config_.q_progress * rates[k] +
               config_.r_input[0] * inputs[k][0] * inputs[k][0] +
               config_.r_input[1] * inputs[k][1] * inputs[k][1];
      if (k > 0) {
        merit += config_.r_progress_change * std::pow(rates[k] - rates[k - 1], 2);
      }
      for (double s : {tube, region}) {
        merit += config_.slack_linear * s + config_.slack_quadratic * s * s;
      }
    }
  } catch (const DomainError& e) {
    out.error = e.what();
    return out;
  }
  out.merit = merit;
  out.ok = std::isfinite(merit);
  return out;
}

MpccResult MpccController::Step(const StateVector& state, double theta,
                                const ResidualModel& model) {
  const int h = config_.horizon;
  const double dt = config_.dt;
  const StateVector sx = StateScale();
  const InputVector su = InputScale();

  std::vector<InputVector> plan(h, InputVector::Zero());
  std::vector<double> rates(h, std::max(state[kVx], 1.0));
  if (static_cast<int>(plan_.size()) == h) {
    for (int k = 0; k + 1 < h; ++k) {
      plan[k] = plan_[k + 1];
      rates[k] = rates_[k + 1];
    }
    plan[h - 1] = plan_[h - 1];
    rates[h - 1] = rates_[h - 1];
  }

  Rollout current = Simulate(state, theta, plan, rates, model);
  if (!current.ok) {
    std::fill(plan.begin(), plan.end(), InputVector::Zero());
    std::fill(rates.begin(), rates.end(), std::max(state[kVx], 1.0));
    current = Simulate(state, theta, plan, rates, model);
    if (!current.ok) {
      throw DomainError("mpcc cannot roll out from this state: " +
                        current.error);
    }
  }

  // Variable layout: per stage [x(8) theta dT d_delta v], terminal
  // [x(8) theta], then (tube, region) slacks for stages 1..H.
  auto xi = [](int k) { return 12 * k; };
  auto ui = [](int k) { return 12 * k + 9; };
  auto si = [h](int k) { return 12 * h + 9 + 2 * (k - 1); };
  const int n = 12 * h + 9 + 2 * h;

  MpccResult result;
  QpSolution last;
  for (int iter = 0; iter < config_.sqp_iterations; ++iter) {
    const std::vector<StateVector>& traj = current.states;
    internal::QpBuilder qp(n);
    for (int i = 0; i < 8; ++i) {
      qp.AddEquality({{xi(0) + i, 1.0}}, sx[i] * state[i]);
    }
    qp.AddEquality({{xi(0) + 8, 1.0}}, theta);

    std::vector<internal::Term> row;
    for (int k = 0; k < h; ++k) {
      const Linearization lin = Linearize(traj[k], plan[k], dt, vehicle_, tires_);
      const StateVector offset =
          traj[k + 1] - lin.a * traj[k] - lin.b * plan[k];
      for (int i = 0; i < 8; ++i) {
        row.clear();
        row.emplace_back(xi(k + 1) + i, 1.0);
        for (int j = 0; j < 8; ++j) {
          const double a = lin.a(i, j);
          if (a != 0.0) row.emplace_back(xi(k) + j, -sx[i] * a / sx[j]);
        }
        for (int j = 0; j < 2; ++j) {
          const double b = lin.b(i, j);
          if (b != 0.0) row.emplace_back(ui(k) + j, -sx[i] * b / su[j]);
        }
        qp.AddEquality(row, sx[i] * offset[i]);
      }
      qp.AddEquality({{xi(k + 1) + 8, 1.0}, {xi(k) + 8, -1.0}, {ui(k) + 2, -dt}},
                     0.0);
    }

    for (int k = 1; k <= h; ++k) {
      const StateVector& xb = traj[k];
      const double tb = current.progress[k];
      const LagContour e = LagContourErrors(xb[kPosX], xb[kPosY], tb, track_);
      const double phi = track_.Heading(tb);
      const double kappa = track_.Curvature(tb);
      const double sp = std::sin(phi), cp = std::cos(phi);
      const std::array<double, 3> gc = {sp, -cp, -kappa * e.lag};
      const std::array<double, 3> gl = {-cp, -sp, 1.0 + kappa * e.contour};
      const std::array<int, 3> idx = {xi(k) + kPosX, xi(k) + kPosY, xi(k) + 8};
      const std::array<double, 3> base = {xb[kPosX], xb[kPosY], tb};
      double off_c = e.contour, off_l = e.lag;
      for (int t = 0; t < 3; ++t) {
        off_c -= gc[t] * base[t];
        off_l -= gl[t] * base[t];
      }
      const std::array<internal::Term, 3> tc = {
          {{idx[0], gc[0]}, {idx[1], gc[1]}, {idx[2], gc[2]}}};
      const std::array<internal::Term, 3> tl = {
          {{idx[0], gl[0]}, {idx[1], gl[1]}, {idx[2], gl[2]}}};
      qp.AddSquaredAffine(tc, off_c, config_.q_contour);
      qp.AddSquaredAffine(tl, off_l, config_.q_lag);

      // Tube: |e_c| <= R + s_tube.
      const int s_tube = si(k), s_region = si(k) + 1;
      row.assign(tc.begin(), tc.end());
      row.emplace_back(s_tube, -1.0);
      qp.AddInequality(row, config_.tube_radius - off_c);
      row.clear();
      for (const auto& [i, a] : tc) row.emplace_back(i, -a);
      row.emplace_back(s_tube, -1.0);
      qp.AddInequality(row, config_.tube_radius + off_c);

      // Region group sharing one slack.
      const Measures m = RegionMeasures(xb, vehicle_, tires_, config_);
      const MeasureJacobian jac = RegionJacobian(xb, vehicle_, tires_, config_);
      for (int c = 0; c < kMeasures; ++c) {
        const double lin0 = m[c] - jac.row(c).dot(xb);
        for (double sign : {1.0, -1.0}) {
          if (sign < 0.0 && !kSymmetric[c]) continue;
          row.clear();
          for (int j = 0; j < 8; ++j) {
            if (jac(c, j) != 0.0) {
              row.emplace_back(xi(k) + j, sign * jac(c, j) / sx[j]);
            }
          }
          row.emplace_back(s_region, -1.0);
          qp.AddInequality(row, 1.0 - sign * lin0);
        }
      }
      for (int s : {s_tube, s_region}) {
        qp.AddInequality({{s, -1.0}}, 0.0);
        qp.AddLinear(s, config_.slack_linear);
        qp.AddProduct(s, s, config_.slack_quadratic);
      }

      qp.AddBounds(xi(k) + kTorque, -sx[kTorque] * vehicle_.max_torque,
                   sx[kTorque] * vehicle_.max_torque);
      qp.AddBounds(xi(k) + kSteer, -vehicle_.max_steer, vehicle_.max_steer);
    }

    for (int k = 0; k < h; ++k) {
      for (int j = 0; j < 2; ++j) {
        qp.AddProduct(ui(k) + j, ui(k) + j,
                      config_.r_input[j] / (su[j] * su[j]));
        qp.AddSquare(ui(k) + j, su[j] * plan[k][j], config_.proximal);
      }
      qp.AddLinear(ui(k) + 2, -config_.q_progress);
      qp.AddSquare(ui(k) + 2, rates[k], config_.proximal);
      if (k > 0) {
        qp.AddSquaredAffine({{ui(k) + 2, 1.0}, {ui(k - 1) + 2, -1.0}}, 0.0,
                            config_.r_progress_change);
      }
      qp.AddBounds(ui(k), -su[0] * vehicle_.max_torque_rate,
                   su[0] * vehicle_.max_torque_rate);
      qp.AddBounds(ui(k) + 1, -vehicle_.max_steer_rate,
                   vehicle_.max_steer_rate);
      qp.AddBounds(ui(k) + 2, 0.0, config_.max_progress_rate);
    }

    const QpSolution sol = SolveQp(qp.Build(), config_.qp);
    result.stats.sqp_iterations = iter + 1;
    result.stats.qp_iterations += sol.iterations;
    result.stats.status = sol.status;
    result.stats.kkt_residual = sol.kkt_residual;
    if (!Acceptable(sol)) {
      result.stats.degraded = true;
      break;
    }
    last = sol;

    std::vector<InputVector> target(h);
    std::vector<double> target_rates(h);
    for (int k = 0; k < h; ++k) {
      target[k] = sol.x.segment<2>(ui(k)).cwiseQuotient(su);
      target_rates[k] = sol.x[ui(k) + 2];
    }
    // Damped step on the nonlinear rollout merit.
    bool moved = false;
    for (double step : {1.0, 0.5, 0.25}) {
      std::vector<InputVector> trial(h);
      std::vector<double> trial_rates(h);
      for (int k = 0; k < h; ++k) {
        trial[k] = plan[k] + step * (target[k] - plan[k]);
        trial_rates[k] = rates[k] + step * (target_rates[k] - rates[k]);
      }
      Rollout r = Simulate(state, theta, trial, trial_rates, model);
      if (r.ok && r.merit < current.merit) {
        plan = std::move(trial);
        rates = std::move(trial_rates);
        current = std::move(r);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  if (last.x.size() == n) {
    result.slacks.resize(h);
    for (int k = 1; k <= h; ++k) {
      result.slacks[k - 1] = {last.x[si(k)], last.x[si(k) + 1]};
    }
  }
  result.input = plan[0];
  result.input[0] = std::clamp(result.input[0], -vehicle_.max_torque_rate,
                               vehicle_.max_torque_rate);
  result.input[1] = std::clamp(result.input[1], -vehicle_.max_steer_rate,
                               vehicle_.max_steer_rate);
  result.progress_rate = rates[0];
  result.trajectory = current.states;
  result.progress = current.progress;
  result.inputs = plan;
  result.progress_rates = rates;
  plan_ = std::move(plan);
  rates_ = std::move(rates);
  return result;
}

}  // namespace split
