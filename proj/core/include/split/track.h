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

#ifndef SPLIT_TRACK_H_
#define SPLIT_TRACK_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "split/vehicle.h"

namespace split {

// Periodic cubic spline through scalar knot values on a nonuniform grid.
class PeriodicSpline {
 public:
  PeriodicSpline() = default;
  // `knots` strictly increasing; the period is knots.back() + closing gap,
  // given explicitly as `period`. values.size() == knots.size().
  PeriodicSpline(std::vector<double> knots, std::vector<double> values,
                 double period);

  double Value(double t) const;
  double Derivative(double t) const;
  double SecondDerivative(double t) const;
  double period() const { return period_; }

 private:
  // Segment index and local offset of t after wrapping.
  int Locate(double t, double* local) const;
  double SegmentLength(int i) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> moments_;  // second derivatives at knots
  double period_ = 0.0;
};

// Closed centerline parameterized by arc length.
class Track {
 public:
  // Waypoints describe a closed loop; the last point must not repeat the
  // first. Throws ConfigError for fewer than 4 points or repeated points.
  static Track FromWaypoints(const std::vector<Eigen::Vector2d>& waypoints,
                             double tube_radius, double spacing = 0.5);
  // Whitespace separated "X Y" lines; '#' starts a comment.
  static Track FromFile(const std::string& path, double tube_radius,
                        double spacing = 0.5);
  // Straight segment from the origin along +X, open-ended in practice.
  static Track Straight(double length, double tube_radius);

  double length() const { return length_; }
  double tube_radius() const { return tube_radius_; }

  double Wrap(double theta) const;
  Eigen::Vector2d Position(double theta) const;
  // Unit tangent.
  Eigen::Vector2d Tangent(double theta) const;
  // Tangent heading, in (-pi, pi].
  double Heading(double theta) const;
  double Curvature(double theta) const;

  // Arc length of the closest centerline point, searched within
  // [guess - window, guess + window]. Result is not wrapped.
  double Project(const Eigen::Vector2d& point, double guess,
                 double window) const;
  // Closest centerline point over the whole loop, in [0, length).
  double ProjectGlobal(const Eigen::Vector2d& point) const;

 private:
  PeriodicSpline x_;
  PeriodicSpline y_;
  double length_ = 0.0;
  double tube_radius_ = 0.0;
  bool closed_ = true;
};

struct LagContour {
  double lag = 0.0;
  double contour = 0.0;
};

// e_l = -cos(phi) dX - sin(phi) dY, e_c = sin(phi) dX - cos(phi) dY with
// (dX, dY) the offset of the car from the centerline point at theta.
LagContour LagContourErrors(double x, double y, double theta,
                            const Track& track);
LagContour LagContourErrors(const VehicleState& state, double theta,
                            const Track& track);

// Angle a + 2 pi k closest to `reference`.
double UnwrapNear(double angle, double reference);

}  // namespace split

#endif  // SPLIT_TRACK_H_
