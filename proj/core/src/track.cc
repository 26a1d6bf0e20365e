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

#include "split/track.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "split/errors.h"

namespace split {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

PeriodicSpline::PeriodicSpline(std::vector<double> knots,
                               std::vector<double> values, double period)
    : knots_(std::move(knots)), values_(std::move(values)), period_(period) {
  const int n = static_cast<int>(knots_.size());
  if (n < 3 || static_cast<int>(values_.size()) != n) {
    throw DomainError("periodic spline needs at least 3 matching knots");
  }
  if (!(period_ > knots_.back() - knots_.front())) {
    throw DomainError("spline period must exceed the knot span");
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (!(knots_[i + 1] > knots_[i])) {
      throw DomainError("spline knots must be strictly increasing");
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const int next = (i + 1) % n;
    const double h_prev = SegmentLength(prev);
    const double h = SegmentLength(i);
    triplets.emplace_back(i, prev, h_prev);
    triplets.emplace_back(i, i, 2.0 * (h_prev + h));
    triplets.emplace_back(i, next, h);
    rhs[i] = 6.0 * ((values_[next] - values_[i]) / h -
                    (values_[i] - values_[prev]) / h_prev);
  }
  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(system);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("periodic spline system is singular");
  }
  const Eigen::VectorXd m = lu.solve(rhs);
  moments_.assign(m.data(), m.data() + n);
}

double PeriodicSpline::SegmentLength(int i) const {
  const int n = static_cast<int>(knots_.size());
  if (i == n - 1) return period_ - (knots_[n - 1] - knots_[0]);
  return knots_[i + 1] - knots_[i];
}

int PeriodicSpline::Locate(double t, double* local) const {
  double u = std::fmod(t - knots_.front(), period_);
  if (u < 0.0) u += period_;
  u += knots_.front();
  auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  const int i = static_cast<int>(it - knots_.begin()) - 1;
  *local = std::clamp(u - knots_[std::max(i, 0)], 0.0, SegmentLength(i));
  return std::max(i, 0);
}

double PeriodicSpline::Value(double t) const {
  double u;
  const int i = Locate(t, &u);
  const int j = (i + 1) % static_cast<int>(knots_.size());
  const double h = SegmentLength(i);
  const double w = h - u;
  return moments_[i] * w * w * w / (6.0 * h) +
         moments_[j] * u * u * u / (6.0 * h) +
         (values_[i] / h - moments_[i] * h / 6.0) * w +
         (values_[j] / h - moments_[j] * h / 6.0) * u;
}

double PeriodicSpline::Derivative(double t) const {
  double u;
  const int i = Locate(t, &u);
  const int j = (i + 1) % static_cast<int>(knots_.size());
  const double h = SegmentLength(i);
  const double w = h - u;
  return -moments_[i] * w * w / (2.0 * h) + moments_[j] * u * u / (2.0 * h) +
         (values_[j] - values_[i]) / h - (moments_[j] - moments_[i]) * h / 6.0;
}

double PeriodicSpline::SecondDerivative(double t) const {
  double u;
  const int i = Locate(t, &u);
  const int j = (i + 1) % static_cast<int>(knots_.size());
  const double h = SegmentLength(i);
  return (moments_[i] * (h - u) + moments_[j] * u) / h;
}

Track Track::FromWaypoints(const std::vector<Eigen::Vector2d>& waypoints,
                           double tube_radius, double spacing) {
  const int n = static_cast<int>(waypoints.size());
  if (n < 4) throw ConfigError("track needs at least 4 waypoints");
  if (!(tube_radius > 0.0)) throw ConfigError("tube radius must be positive");
  if (!(spacing > 0.0)) throw ConfigError("track spacing must be positive");

  // Chord-length spline first.
  std::vector<double> chord(n, 0.0), xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = waypoints[i].x();
    ys[i] = waypoints[i].y();
    if (i > 0) {
      const double d = (waypoints[i] - waypoints[i - 1]).norm();
      if (!(d > 1e-9)) throw ConfigError("track has repeated waypoints");
      chord[i] = chord[i - 1] + d;
    }
  }
  const double closing = (waypoints.front() - waypoints.back()).norm();
  if (!(closing > 1e-9)) {
    throw ConfigError("track waypoints must not repeat the first point");
  }
  const double chord_period = chord.back() + closing;
  PeriodicSpline cx(chord, xs, chord_period);
  PeriodicSpline cy(chord, ys, chord_period);

  // Cumulative arc length on a fine grid, 5-point Gauss-Legendre per cell.
  static constexpr std::array<double, 5> kNodes = {
      -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
      0.9061798459386640};
  static constexpr std::array<double, 5> kWeights = {
      0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
      0.4786286704993665, 0.2369268850561891};
  constexpr int kSub = 16;
  std::vector<double> fine_t, fine_s;
  fine_t.reserve(n * kSub + 1);
  fine_s.reserve(n * kSub + 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t0 = chord[i];
    const double t1 = i + 1 < n ? chord[i + 1] : chord_period;
    for (int k = 0; k < kSub; ++k) {
      const double a = t0 + (t1 - t0) * k / kSub;
      const double b = t0 + (t1 - t0) * (k + 1) / kSub;
      fine_t.push_back(a);
      fine_s.push_back(s);
      double piece = 0.0;
      for (int q = 0; q < 5; ++q) {
        const double t = 0.5 * (a + b) + 0.5 * (b - a) * kNodes[q];
        piece += kWeights[q] * std::hypot(cx.Derivative(t), cy.Derivative(t));
      }
      s += 0.5 * (b - a) * piece;
    }
  }
  fine_t.push_back(chord_period);
  fine_s.push_back(s);

  const double length = s;
  const int count = std::max(8, static_cast<int>(std::round(length / spacing)));
  const double ds = length / count;
  std::vector<double> knots(count), ax(count), ay(count);
  std::size_t j = 0;
  for (int k = 0; k < count; ++k) {
    const double target = k * ds;
    while (j + 2 < fine_s.size() && fine_s[j + 1] <= target) ++j;
    const double frac = (target - fine_s[j]) / (fine_s[j + 1] - fine_s[j]);
    const double t = fine_t[j] + frac * (fine_t[j + 1] - fine_t[j]);
    knots[k] = target;
    ax[k] = cx.Value(t);
    ay[k] = cy.Value(t);
  }

  Track track;
  track.x_ = PeriodicSpline(knots, ax, length);
  track.y_ = PeriodicSpline(knots, ay, length);
  track.length_ = length;
  track.tube_radius_ = tube_radius;
  return track;
}

Track Track::FromFile(const std::string& path, double tube_radius,
                      double spacing) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open track file: " + path);
  std::vector<Eigen::Vector2d> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    double x, y;
    if (!(fields >> x)) continue;
    if (!(fields >> y)) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected two columns");
    }
    points.emplace_back(x, y);
  }
  return FromWaypoints(points, tube_radius, spacing);
}

Track Track::Straight(double length, double tube_radius) {
  if (!(length > 0.0) || !(tube_radius > 0.0)) {
    throw ConfigError("straight track needs positive length and radius");
  }
  Track track;
  track.length_ = length;
  track.tube_radius_ = tube_radius;
  track.closed_ = false;
  return track;
}

double Track::Wrap(double theta) const {
  if (!closed_) return theta;
  double w = std::fmod(theta, length_);
  if (w < 0.0) w += length_;
  return w;
}

Eigen::Vector2d Track::Position(double theta) const {
  if (!closed_) return {theta, 0.0};
  return {x_.Value(theta), y_.Value(theta)};
}

Eigen::Vector2d Track::Tangent(double theta) const {
  if (!closed_) return {1.0, 0.0};
  return Eigen::Vector2d(x_.Derivative(theta), y_.Derivative(theta))
      .normalized();
}

double Track::Heading(double theta) const {
  const Eigen::Vector2d t = Tangent(theta);
  return std::atan2(t.y(), t.x());
}

double Track::Curvature(double theta) const {
  if (!closed_) return 0.0;
  const double dx = x_.Derivative(theta), dy = y_.Derivative(theta);
  const double ddx = x_.SecondDerivative(theta);
  const double ddy = y_.SecondDerivative(theta);
  return (dx * ddy - dy * ddx) / std::pow(dx * dx + dy * dy, 1.5);
}

double Track::Project(const Eigen::Vector2d& point, double guess,
                      double window) const {
  if (!closed_) return point.x();
  constexpr double kStep = 0.25;
  const int steps = std::max(1, static_cast<int>(std::ceil(window / kStep)));
  double best = guess;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = -steps; k <= steps; ++k) {
    const double theta = guess + k * kStep;
    const double d = (Position(theta) - point).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = theta;
    }
  }
  // Newton on the orthogonality condition, confined to the bracket.
  const double lo = best - kStep, hi = best + kStep;
  double theta = best;
  for (int it = 0; it < 8; ++it) {
    const Eigen::Vector2d offset = Position(theta) - point;
    const Eigen::Vector2d d1(x_.Derivative(theta), y_.Derivative(theta));
    const Eigen::Vector2d d2(x_.SecondDerivative(theta),
                             y_.SecondDerivative(theta));
    const double f = offset.dot(d1);
    const double df = d1.squaredNorm() + offset.dot(d2);
    if (!(df > 0.0)) break;
    const double next = std::clamp(theta - f / df, lo, hi);
    if (std::abs(next - theta) < 1e-12) {
      theta = next;
      break;
    }
    theta = next;
  }
  return theta;
}

double Track::ProjectGlobal(const Eigen::Vector2d& point) const {
  if (!closed_) return point.x();
  return Wrap(Project(point, 0.5 * length_, 0.5 * length_ + 0.5));
}

LagContour LagContourErrors(double x, double y, double theta,
                            const Track& track) {
  const Eigen::Vector2d c = track.Position(theta);
  const double phi = track.Heading(theta);
  const double dx = x - c.x(), dy = y - c.y();
  return {-std::cos(phi) * dx - std::sin(phi) * dy,
          std::sin(phi) * dx - std::cos(phi) * dy};
}

LagContour LagContourErrors(const VehicleState& state, double theta,
                            const Track& track) {
  return LagContourErrors(state.x, state.y, theta, track);
}

double UnwrapNear(double angle, double reference) {
  return reference + std::remainder(angle - reference, kTwoPi);
}

}  // namespace split
