// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "ffem/interp.hpp"
#include "ffem/projlab.hpp"

using namespace ffem;

namespace
{
std::shared_ptr<const Mesh> UnitMesh(int level)
{
  return std::make_shared<const Mesh>(GenerateUnitSquare(level));
}

// A discrete field seen as a smooth field through point location.
AnalyticField AsAnalytic(const Field &field)
{
  auto loc = std::make_shared<TriangleLocator>(field.space.GetMesh());
  auto at = [field, loc](double r, double z)
  {
    const int t = loc->Locate({r, z}, 1e-10);
    return EvalField(field, t, {r, z});
  };
  AnalyticField f;
  f.components = NumComponents(field.space.Kind());
  f.value = [at](double r, double z) { return at(r, z).phys; };
  switch (field.space.Kind())
  {
    case SpaceKind::A:
      f.combo_a = [at](double r, double z) { return at(r, z).reg[0]; };
      break;
    case SpaceKind::B:
      f.combo_b = [at](double r, double z)
      {
        const Vec3 g = at(r, z).reg;
        return Vec2{g[1], g[2]};
      };
      break;
    case SpaceKind::C:
      f.combo_c = [at](double r, double z) { return at(r, z).reg[1]; };
      break;
    case SpaceKind::D:
      break;
  }
  return f;
}
}  // namespace

TEST(Interp, ReproducesDiscreteFields)
{
  auto mesh = UnitMesh(2);
  for (int k = 0; k <= 3; k++)
  {
    const SpaceHandle s = BuildSpace(mesh, KindOfDegree(k), 3);
    Field f(s);
    for (int i = 0; i < s.DofCount(); i++)
      f.coeffs[i] = std::sin(1.3 * i + k);
    const Field g = Interpolate(s, AsAnalytic(f));
    EXPECT_LT((g.coeffs - f.coeffs).cwiseAbs().maxCoeff(), 1e-10) << "k=" << k;
    EXPECT_LT(L2rError(f, AsAnalytic(f)), 1e-10);
  }
}

TEST(Interp, ConstantIsExact)
{
  auto mesh = UnitMesh(2);
  const Field one = Interpolate(BuildSpace(mesh, SpaceKind::D, 1), ConstantScalar(1.0));
  EXPECT_LT(L2rError(one, ConstantScalar(1.0)), 1e-13);
  EXPECT_NEAR(L2rNorm(one), std::sqrt(0.5), 1e-13);
  EXPECT_NEAR(L2rError(*mesh, ZeroField(1), ConstantScalar(1.0)), std::sqrt(0.5), 1e-14);
}

TEST(Interp, CommutesOnPolynomials)
{
  auto mesh = UnitMesh(2);
  for (int n : {1, 2, 4})
  {
    for (SpaceKind kind : {SpaceKind::A, SpaceKind::B, SpaceKind::C})
    {
      const SpaceHandle s = BuildSpace(mesh, kind, n);
      EXPECT_LT(CommutingDiagramResidual(s, PolynomialTestForm(kind, n)), 1e-12)
          << KindName(kind) << " n=" << n;
    }
  }
}

TEST(Interp, CommutesOnSmoothField)
{
  auto mesh = UnitMesh(3);
  SmoothForm u;
  u.kind = SpaceKind::B;
  u.n = 2;
  u.pot = {[](const Jet &r, const Jet &z) { return r * z * z; },
           [](const Jet &r, const Jet &z) { return r * r * z; },
           [](const Jet &, const Jet &z) { return z * z * z; }};
  EXPECT_LT(CommutingDiagramResidual(BuildSpace(mesh, SpaceKind::B, 2), u), 1e-10);
}

TEST(Interp, FirstOrderConvergence)
{
  SmoothForm u;
  u.kind = SpaceKind::C;
  u.n = 1;
  u.pot = {[](const Jet &r, const Jet &z) { return sin(r + z); },
           [](const Jet &r, const Jet &z) { return cos(r * z); },
           [](const Jet &r, const Jet &z) { return exp(r - z); }};
  const AnalyticField ua = u.Analytic();
  double prev = 0.0;
  for (int level = 2; level <= 5; level++)
  {
    const SpaceHandle s = BuildSpace(UnitMesh(level), SpaceKind::C, 1);
    const double e = L2rError(Interpolate(s, ua), ua);
    if (level > 2)
    {
        EXPECT_NEAR(std::log2(prev / e), 1.0, 0.1);
    }
    prev = e;
  }
}

TEST(Interp, PerTriangleErrorsSum)
{
  auto mesh = UnitMesh(2);
  const SmoothForm p = PolynomialTestForm(SpaceKind::B, 1);
  const SpaceHandle s = BuildSpace(mesh, SpaceKind::B, 1);
  SmoothForm q = p;
  q.pot[0] = [](const Jet &r, const Jet &z) { return sin(r * z); };
  const AnalyticField qa = q.Analytic();
  const Field f = Interpolate(s, qa);
  EXPECT_NEAR(std::sqrt(L2rErrorSquaredPerTriangle(f, qa).sum()), L2rError(f, qa), 1e-14);
}

TEST(Interp, DifferenceAcrossLevels)
{
  const SpaceHandle coarse = BuildSpace(UnitMesh(2), SpaceKind::D, 1);
  const SpaceHandle fine = BuildSpace(UnitMesh(3), SpaceKind::D, 1);
  const Field a = Interpolate(coarse, ConstantScalar(2.0));
  const Field b = Interpolate(fine, ConstantScalar(2.0));
  EXPECT_LT(L2rDifference(b, a), 1e-13);
}
