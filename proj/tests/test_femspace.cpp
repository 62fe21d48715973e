// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "ffem/femspace.hpp"

using namespace ffem;

namespace
{
std::shared_ptr<const Mesh> UnitMesh(int level)
{
  return std::make_shared<const Mesh>(GenerateUnitSquare(level));
}

const SpaceKind kKinds[] = {SpaceKind::A, SpaceKind::B, SpaceKind::C, SpaceKind::D};
}  // namespace

TEST(FemSpace, DofCounts)
{
  auto mesh = UnitMesh(2);
  const int nv = mesh->NumVertices(), ne = mesh->NumEdges(), nt = mesh->NumTriangles();
  EXPECT_EQ(BuildSpace(mesh, SpaceKind::A, 1).DofCount(), nv);
  EXPECT_EQ(BuildSpace(mesh, SpaceKind::B, 1).DofCount(), nv + ne);
  EXPECT_EQ(BuildSpace(mesh, SpaceKind::C, 1).DofCount(), ne + nt);
  EXPECT_EQ(BuildSpace(mesh, SpaceKind::D, 1).DofCount(), nt);
  // Alternating sum equals the Euler characteristic of the meridian domain.
  EXPECT_EQ(nv - (nv + ne) + (ne + nt) - nt, 0);
}

TEST(FemSpace, NextSpaceWalksTheSequence)
{
  auto mesh = UnitMesh(1);
  SpaceHandle s = BuildSpace(mesh, SpaceKind::A, 4);
  for (int k = 1; k <= 3; k++)
  {
    s = NextSpace(s);
    EXPECT_EQ(s.Degree(), k);
    EXPECT_EQ(s.Mode(), 4);
  }
  EXPECT_THROW(NextSpace(s), std::exception);
}

TEST(FemSpace, RejectsBadMode)
{
  EXPECT_THROW(BuildSpace(UnitMesh(1), SpaceKind::A, 0), std::invalid_argument);
}

TEST(FemSpace, LocalDuality)
{
  for (int n : {1, 2, 7})
  {
    auto mesh = UnitMesh(2);
    for (SpaceKind kind : kKinds)
    {
      EXPECT_LT(LocalDualityError(BuildSpace(mesh, kind, n)), 1e-12)
          << KindName(kind) << " n=" << n;
    }
  }
}

TEST(FemSpace, RegularAndPhysicalDerivativesAgree)
{
  auto mesh = UnitMesh(2);
  const Point probes[] = {{0.1, 0.2}, {0.6, 0.9}, {0.95, 0.05}};
  for (int n : {1, 3})
  {
    for (SpaceKind kind : {SpaceKind::A, SpaceKind::B, SpaceKind::C})
    {
      const SpaceHandle space = BuildSpace(mesh, kind, n);
      const SpaceKind next = KindOfDegree(FormDegree(kind) + 1);
      for (int t = 0; t < mesh->NumTriangles(); t += 5)
      {
        const LocalBasis basis = BuildLocalBasis(space, t);
        for (int i = 0; i < basis.size; i++)
        {
          const PolyVec via_reg = RegularToPhysical(next, n, RegularDerivative(kind, basis.reg[i]));
          const PolyVec via_phys = PhysicalDerivative(kind, n, basis.phys[i]);
          for (const Point &p : probes)
          {
            for (int c = 0; c < NumComponents(next); c++)
            {
              EXPECT_NEAR(via_reg[c](p[0], p[1]), via_phys[c](p[0], p[1]), 1e-11);
            }
          }
        }
      }
    }
  }
}

TEST(FemSpace, RegularPhysicalRoundTrip)
{
  auto mesh = UnitMesh(1);
  for (SpaceKind kind : kKinds)
  {
    const SpaceHandle space = BuildSpace(mesh, kind, 2);
    const LocalBasis basis = BuildLocalBasis(space, 0);
    for (int i = 0; i < basis.size; i++)
    {
      const PolyVec back = PhysicalToRegular(kind, 2, RegularToPhysical(kind, 2, basis.reg[i]));
      for (int c = 0; c < NumComponents(kind); c++)
      {
        EXPECT_NEAR(back[c](0.3, 0.4), basis.reg[i][c](0.3, 0.4), 1e-12);
      }
    }
  }
}

TEST(FemSpace, EvalFieldMatchesBasisSum)
{
  auto mesh = UnitMesh(2);
  const SpaceHandle space = BuildSpace(mesh, SpaceKind::B, 2);
  Field f(space);
  for (int i = 0; i < space.DofCount(); i++)
    f.coeffs[i] = std::sin(1.0 + i);
  const int t = 7;
  const Point p = mesh->Centroid(t);
  std::array<int, 6> idx;
  std::array<double, 6> sgn;
  space.LocalDofs(t, idx, sgn);
  const BasisValues bv = EvalBasis(space, t, p);
  Vec3 sum{};
  for (int i = 0; i < bv.size; i++)
    for (int c = 0; c < 3; c++)
      sum[c] += sgn[i] * f.coeffs[idx[i]] * bv.phys[i][c];
  const FieldValue v = EvalField(f, t, p);
  for (int c = 0; c < 3; c++)
    EXPECT_NEAR(v.phys[c], sum[c], 1e-13);
}

TEST(FemSpace, TangentialContinuityAcrossEdges)
{
  auto mesh = UnitMesh(2);
  const SpaceHandle space = BuildSpace(mesh, SpaceKind::B, 3);
  Field f(space);
  for (int i = 0; i < space.DofCount(); i++)
    f.coeffs[i] = std::cos(0.3 * i);
  for (int e = 0; e < mesh->NumEdges(); e++)
  {
    const auto [t0, t1] = mesh->edge_tris[e];
    if (t1 < 0)
      continue;
    const Point a = mesh->vertices[mesh->edges[e][0]], b = mesh->vertices[mesh->edges[e][1]];
    const Point m{0.3 * a[0] + 0.7 * b[0], 0.3 * a[1] + 0.7 * b[1]};
    const Vec3 u0 = EvalField(f, t0, m).phys, u1 = EvalField(f, t1, m).phys;
    const double tr = b[0] - a[0], tz = b[1] - a[1];
    EXPECT_NEAR(u0[0] * tr + u0[2] * tz, u1[0] * tr + u1[2] * tz, 1e-12);
    EXPECT_NEAR(u0[1], u1[1], 1e-12);
  }
}
