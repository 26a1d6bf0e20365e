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

#include "split/region.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace split {

void RegionSpec::Validate() const {
  if (!(alpha_max > 0.0)) throw ConfigError("region.alpha_max must be > 0");
  if (!(alpha_diff_max > 0.0)) {
    throw ConfigError("region.alpha_diff_max must be > 0");
  }
  if (!(p_long > 0.0)) throw ConfigError("region.p_long must be > 0");
  if (!(p_ellipse > 0.0 && p_ellipse <= 1.0)) {
    throw ConfigError("region.p_ellipse must lie in (0, 1]");
  }
  if (!(cell_edges.array() > 0.0).all()) {
    throw ConfigError("region.cell_edges must be > 0");
  }
}

std::string_view ViolationName(Violation v) {
  switch (v) {
    case Violation::kFrontTireEllipse:
      return "front-tire-ellipse";
    case Violation::kRearTireEllipse:
      return "rear-tire-ellipse";
    case Violation::kSlipAngle:
      return "slip-angle";
    case Violation::kSlipAngleDifference:
      return "slip-angle-difference";
    case Violation::kTorqueRange:
      return "torque-range";
  }
  return "unknown";
}

bool Validity::Has(Violation v) const {
  return std::find(violations.begin(), violations.end(), v) !=
         violations.end();
}

Validity CheckValidity(const Feature& z, const VehicleParams& params,
                       const TireParams& tires, const RegionSpec& spec) {
  Validity out;
  const double alpha_f = z[0];
  const double alpha_r = z[1];
  const double torque = z[2] * params.max_torque;

  const LongitudinalForcePair fx = LongitudinalForces(torque, params);
  const double fy_f = TireLateralForce(alpha_f, Axle::kFront, tires);
  const double fy_r = TireLateralForce(alpha_r, Axle::kRear, tires);
  auto within_ellipse = [&](double fx_axle, double fy_axle, double peak) {
    const double lhs = std::pow(spec.p_long * fx_axle, 2) + fy_axle * fy_axle;
    return lhs <= std::pow(spec.p_ellipse * peak, 2);
  };
  if (!within_ellipse(fx.front, fy_f, tires.d_front)) {
    out.violations.push_back(Violation::kFrontTireEllipse);
  }
  if (!within_ellipse(fx.rear, fy_r, tires.d_rear)) {
    out.violations.push_back(Violation::kRearTireEllipse);
  }
  if (!(std::abs(alpha_f) <= spec.alpha_max &&
        std::abs(alpha_r) <= spec.alpha_max)) {
    out.violations.push_back(Violation::kSlipAngle);
  }
  // alpha_f is measured against the steering direction, so the handling
  // balance front-minus-rear reads -alpha_f - alpha_r here.
  if (!(std::abs(alpha_f + alpha_r) <= spec.alpha_diff_max)) {
    out.violations.push_back(Violation::kSlipAngleDifference);
  }
  if (!(std::abs(z[2]) <= 1.0)) {
    out.violations.push_back(Violation::kTorqueRange);
  }
  return out;
}

std::string ToString(const CellIndex& c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + "," +
         std::to_string(c.k) + ")";
}

int CellCoordinate(double x, double edge) {
  // floor(x / edge) can land one cell off near a boundary; the cell edges are
  // defined as n * edge, so settle against those products.
  auto n = static_cast<int>(std::floor(x / edge));
  if (static_cast<double>(n + 1) * edge <= x) ++n;
  if (static_cast<double>(n) * edge > x) --n;
  return n;
}

std::int64_t Lattice::CellCount() const {
  return static_cast<std::int64_t>(hi.i - lo.i + 1) * (hi.j - lo.j + 1) *
         (hi.k - lo.k + 1);
}

bool Lattice::Contains(const CellIndex& c) const {
  return c.i >= lo.i && c.i <= hi.i && c.j >= lo.j && c.j <= hi.j &&
         c.k >= lo.k && c.k <= hi.k;
}

Lattice PartitionLattice(const RegionSpec& spec) {
  const Eigen::Vector3d& e = spec.cell_edges;
  return {{CellCoordinate(-spec.alpha_max, e[0]),
           CellCoordinate(-spec.alpha_max, e[1]), CellCoordinate(-1.0, e[2])},
          {CellCoordinate(spec.alpha_max, e[0]),
           CellCoordinate(spec.alpha_max, e[1]), CellCoordinate(1.0, e[2])}};
}

CellIndex CellCoordinates(const Feature& z, const RegionSpec& spec) {
  return {CellCoordinate(z[0], spec.cell_edges[0]),
          CellCoordinate(z[1], spec.cell_edges[1]),
          CellCoordinate(z[2], spec.cell_edges[2])};
}

CellIndex CellOf(const Feature& z, const RegionSpec& spec) {
  if (!(std::abs(z[0]) <= spec.alpha_max && std::abs(z[1]) <= spec.alpha_max &&
        std::abs(z[2]) <= 1.0)) {
    throw OutOfRegion("feature outside the partition bounding box");
  }
  return CellCoordinates(z, spec);
}

int CellDistance(const CellIndex& a, const CellIndex& b) {
  return std::max({std::abs(a.i - b.i), std::abs(a.j - b.j),
                   std::abs(a.k - b.k)});
}

}  // namespace split
