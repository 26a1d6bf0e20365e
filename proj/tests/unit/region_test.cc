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

#include <random>

#include <gtest/gtest.h>

#include "split/errors.h"

namespace split {
namespace {

Validity Check(const Feature& z, const VehicleParams& v = {},
               const RegionSpec& r = {}) {
  return CheckValidity(z, v, TireParams{}, r);
}

TEST(Validity, OriginValid) {
  VehicleParams v;
  v.front_rolling_resistance = 1e-9;
  v.rear_rolling_resistance = 1e-9;
  EXPECT_TRUE(Check(Feature::Zero(), v).ok());
}

TEST(Validity, SlipAngleBound) {
  const Validity v = Check(Feature(0.19, 0.1, 0.0));
  EXPECT_FALSE(v.ok());
  EXPECT_TRUE(v.Has(Violation::kSlipAngle));
}

TEST(Validity, SlipDifferenceBound) {
  const Validity v = Check(Feature(0.12, 0.0, 0.0));
  EXPECT_FALSE(v.ok());
  EXPECT_TRUE(v.Has(Violation::kSlipAngleDifference));
  EXPECT_FALSE(v.Has(Violation::kSlipAngle));
}

TEST(Validity, BalancedTurnAccepted) {
  // Front and rear slip of opposite sign in feature coordinates is the
  // balanced (neutral) turn.
  EXPECT_TRUE(Check(Feature(0.06, -0.05, 0.1)).ok());
}

TEST(Validity, TireEllipse) {
  // Full torque with large rear slip exceeds the rear ellipse.
  const Validity v = Check(Feature(-0.08, 0.08, 1.0));
  EXPECT_TRUE(v.Has(Violation::kRearTireEllipse));
}

TEST(Validity, TorqueRange) {
  EXPECT_TRUE(Check(Feature(0, 0, 1.2)).Has(Violation::kTorqueRange));
}

TEST(Validity, EveryRejectionIsNamed) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-0.25, 0.25), t(-1.2, 1.2);
  int valid = 0;
  for (int i = 0; i < 100000; ++i) {
    const Validity v = Check(Feature(a(rng), a(rng), t(rng)));
    if (v.ok()) {
      ++valid;
    } else {
      ASSERT_FALSE(v.violations.empty());
    }
  }
  EXPECT_GT(valid, 1000);
}

TEST(Cells, OriginCell) {
  const CellIndex c = CellOf(Feature::Zero(), RegionSpec{});
  EXPECT_EQ(c, (CellIndex{0, 0, 0}));
}

TEST(Cells, SameCellExample) {
  EXPECT_EQ(CellOf(Feature(0.019, 0.019, 0.09), RegionSpec{}),
            CellOf(Feature(0.001, 0.001, 0.01), RegionSpec{}));
}

TEST(Cells, HalfOpenBoundary) {
  const CellIndex a = CellOf(Feature(0.019, 0, 0), RegionSpec{});
  const CellIndex b = CellOf(Feature(0.020, 0, 0), RegionSpec{});
  EXPECT_EQ(b.i, a.i + 1);
  EXPECT_EQ(b.j, a.j);
  EXPECT_EQ(b.k, a.k);
  EXPECT_EQ(CellCoordinate(-0.02, 0.02), -1);
  EXPECT_EQ(CellCoordinate(-1e-12, 0.02), -1);
}

TEST(Cells, OutsideBoxThrows) {
  EXPECT_THROW(CellOf(Feature(0.3, 0, 0), RegionSpec{}), OutOfRegion);
  EXPECT_THROW(CellOf(Feature(0, 0, -1.5), RegionSpec{}), OutOfRegion);
}

TEST(Cells, TilingAndTranslation) {
  const RegionSpec r;
  const Lattice lattice = PartitionLattice(r);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-r.alpha_max, r.alpha_max),
      t(-1, 1);
  for (int n = 0; n < 100000; ++n) {
    const Feature z(a(rng), a(rng), t(rng));
    const CellIndex c = CellOf(z, r);
    ASSERT_TRUE(lattice.Contains(c));
    const Eigen::Vector3d lo(c.i * r.cell_edges[0], c.j * r.cell_edges[1],
                             c.k * r.cell_edges[2]);
    for (int d = 0; d < 3; ++d) {
      ASSERT_LE(lo[d], z[d] + 1e-15);
      ASSERT_LT(z[d], lo[d] + r.cell_edges[d] + 1e-15);
    }
    const CellIndex s = CellCoordinates(z + r.cell_edges, r);
    ASSERT_EQ(s, (CellIndex{c.i + 1, c.j + 1, c.k + 1}));
  }
}

TEST(Cells, BoundaryProbes) {
  const RegionSpec r;
  const Lattice lattice = PartitionLattice(r);
  for (int i = lattice.lo.i; i <= lattice.hi.i; ++i) {
    const double x = i * r.cell_edges[0];
    if (std::abs(x) > r.alpha_max) continue;
    const CellIndex c = CellOf(Feature(x, 0.0, 0.0), r);
    EXPECT_EQ(c.i, i);
  }
}

TEST(RegionSpec, Validation) {
  RegionSpec r;
  r.cell_edges[1] = 0;
  EXPECT_THROW(r.Validate(), ConfigError);
  RegionSpec q;
  q.p_ellipse = 1.5;
  EXPECT_THROW(q.Validate(), ConfigError);
}

}  // namespace
}  // namespace split
