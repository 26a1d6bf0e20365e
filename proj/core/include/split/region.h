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

#ifndef SPLIT_REGION_H_
#define SPLIT_REGION_H_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "split/gp.h"
#include "split/vehicle.h"

namespace split {

// Valid-region constraints and the cubic partition over its bounding box.
struct RegionSpec {
  double alpha_max = 0.18;       // rad
  double alpha_diff_max = 0.10;  // rad
  double p_long = 0.9;
  double p_ellipse = 0.95;
  // Edge lengths along (alpha_f rad, alpha_r rad, T / T_max).
  Eigen::Vector3d cell_edges{0.02, 0.02, 0.1};

  void Validate() const;
};

enum class Violation {
  kFrontTireEllipse,
  kRearTireEllipse,
  kSlipAngle,
  kSlipAngleDifference,
  kTorqueRange,
};

std::string_view ViolationName(Violation v);

struct Validity {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool Has(Violation v) const;
};

// Checks the tire-ellipse, slip-angle, slip-difference and torque-range
// constraints at a feature. Forces come from the nominal tire model.
Validity CheckValidity(const Feature& z, const VehicleParams& params,
                       const TireParams& tires, const RegionSpec& spec);

// Lattice coordinates of a cell. Cell (i, j, k) covers
// [i e0, (i+1) e0) x [j e1, (j+1) e1) x [k e2, (k+1) e2).
struct CellIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  auto operator<=>(const CellIndex&) const = default;
  bool operator==(const CellIndex&) const = default;
};

std::string ToString(const CellIndex& c);

// Index of the half-open interval [n edge, (n+1) edge) containing x.
int CellCoordinate(double x, double edge);

// Lattice bounds of the partition.
struct Lattice {
  CellIndex lo;
  CellIndex hi;  // inclusive

  std::int64_t CellCount() const;
  bool Contains(const CellIndex& c) const;
};

Lattice PartitionLattice(const RegionSpec& spec);

// Lattice coordinates without the bounding-box check.
CellIndex CellCoordinates(const Feature& z, const RegionSpec& spec);

// Cell owning z. Throws OutOfRegion outside |alpha| <= alpha_max,
// |T / T_max| <= 1.
CellIndex CellOf(const Feature& z, const RegionSpec& spec);

// Chebyshev distance between lattice cells.
int CellDistance(const CellIndex& a, const CellIndex& b);

}  // namespace split

#endif  // SPLIT_REGION_H_
