// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "ffem/mms.hpp"

using namespace ffem;

TEST(Mms, FiniteDifferenceGradient)
{
  AnalyticField u;
  u.components = 1;
  u.value = [](double r, double) { return Vec3{r, 0.0, 0.0}; };
  const Vec3 g = FdOperatorOracle(ContinuousOp::Grad, 1, u, {0.5, 0.5});
  EXPECT_NEAR(g[0], 1.0, 1e-9);
  EXPECT_NEAR(g[1], -1.0, 1e-9);
  EXPECT_NEAR(g[2], 0.0, 1e-9);
}

TEST(Mms, BuiltinCasesConsistent)
{
  for (int k = 0; k <= 3; k++)
  {
    for (const std::string &name : BuiltinFieldNames(k))
    {
      const int n = k == 3 ? 1 : k == 2 ? 3 : k == 1 ? 2 : 1;
      const ManufacturedCase mc = BuiltinCase(k, n, name);
      EXPECT_EQ(mc.k, k);
      EXPECT_EQ(mc.has_sigma, k > 0);
      const ConsistencyReport rep = CheckCaseConsistency(mc);
      EXPECT_LT(rep.sigma_residual, 1e-7) << k << " " << name;
      EXPECT_LT(rep.f_residual, 1e-6) << k << " " << name;
      EXPECT_LT(rep.partials_residual, 1e-7) << k << " " << name;
    }
  }
}

TEST(Mms, UnknownCaseRejected)
{
  EXPECT_THROW(BuiltinCase(3, 1, "nonexistent"), std::exception);
}

TEST(Mms, QuasiRandomPointsInRange)
{
  const auto pts = QuasiRandomPoints(100, 0.1);
  ASSERT_EQ(pts.size(), 100u);
  for (const Point &p : pts)
  {
    EXPECT_GE(p[0], 0.1);
    EXPECT_LE(p[0], 1.0);
    EXPECT_GE(p[1], 0.0);
    EXPECT_LE(p[1], 1.0);
  }
  EXPECT_EQ(pts, QuasiRandomPoints(100, 0.1));
}

TEST(Mms, SweepRhs)
{
  const Vec3 f = SweepRhs().value(0.25, 0.5);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_DOUBLE_EQ(f[1], 0.25);
  EXPECT_EQ(f[2], 0.0);
}
