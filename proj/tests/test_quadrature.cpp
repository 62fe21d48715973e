// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ffem/quadrature.hpp"

using namespace ffem;

namespace
{
double Factorial(int n) { return n <= 1 ? 1.0 : n * Factorial(n - 1); }
}  // namespace

TEST(Quadrature, TriangleRuleExactness)
{
  for (int degree = 1; degree <= 16; degree++)
  {
    const QuadRule &q = TriangleRule(degree);
    for (int a = 0; a <= degree; a++)
    {
      for (int b = 0; a + b <= degree; b++)
      {
        double s = 0.0;
        for (int i = 0; i < q.Size(); i++)
          s += q.weights[i] * std::pow(q.points[i][0], a) * std::pow(q.points[i][1], b);
        const double exact = Factorial(a) * Factorial(b) / Factorial(a + b + 2);
        EXPECT_NEAR(s, exact, 1e-14) << "degree " << degree << " a " << a << " b " << b;
      }
    }
  }
}

TEST(Quadrature, EdgeRuleInteriorAndExact)
{
  for (int degree = 1; degree <= 16; degree++)
  {
    const QuadRule &q = EdgeRule(degree);
    for (const Point &p : q.points)
    {
      EXPECT_GT(p[0], 0.0);
      EXPECT_LT(p[0], 1.0);
    }
    for (int a = 0; a <= degree; a++)
    {
      double s = 0.0;
      for (int i = 0; i < q.Size(); i++)
        s += q.weights[i] * std::pow(q.points[i][0], a);
      EXPECT_NEAR(s, 1.0 / (a + 1), 1e-14);
    }
  }
}

TEST(Quadrature, DiskRuleMoments)
{
  const double pi = std::numbers::pi;
  const QuadRule full = DiskRule(6, 12, false, {2.0, 1.0}, 0.5);
  double area = 0.0, x2 = 0.0;
  for (int i = 0; i < full.Size(); i++)
  {
    area += full.weights[i];
    x2 += full.weights[i] * std::pow(full.points[i][0] - 2.0, 2);
  }
  EXPECT_NEAR(area, pi * 0.25, 1e-14);
  EXPECT_NEAR(x2, pi * std::pow(0.5, 4) / 4.0, 1e-14);

  const QuadRule half = DiskRule(6, 16, true, {0.0, 0.5}, 0.25);
  double harea = 0.0, hx = 0.0;
  for (int i = 0; i < half.Size(); i++)
  {
    EXPECT_GE(half.points[i][0], 0.0);
    harea += half.weights[i];
    hx += half.weights[i] * half.points[i][0];
  }
  EXPECT_NEAR(harea, pi * 0.0625 / 2.0, 1e-14);
  EXPECT_NEAR(hx, 2.0 * std::pow(0.25, 3) / 3.0, 1e-14);
}

TEST(Quadrature, MapToTriangleScalesArea)
{
  const QuadRule q = MapToTriangle(TriangleRule(4), {1, 1}, {3, 1}, {1, 2});
  double s = 0.0, sx = 0.0;
  for (int i = 0; i < q.Size(); i++)
  {
    s += q.weights[i];
    sx += q.weights[i] * q.points[i][0];
  }
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_NEAR(sx, 5.0 / 3.0, 1e-14);
}

TEST(Quadrature, GaussLegendreNodesSorted)
{
  std::vector<double> x, w;
  GaussLegendre01(7, x, w);
  ASSERT_EQ(x.size(), 7u);
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); i++)
  {
    sum += w[i];
    if (i > 0)
    {
        EXPECT_LT(x[i - 1], x[i]);
    }
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
}
