// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ffem/mesh.hpp"

using namespace ffem;

TEST(Mesh, UnitSquareCounts)
{
  for (int level = 1; level <= 4; level++)
  {
    const Mesh m = GenerateUnitSquare(level);
    const int s = 1 << level;
    EXPECT_EQ(m.NumVertices(), (s + 1) * (s + 1));
    EXPECT_EQ(m.NumTriangles(), 2 * s * s);
    EXPECT_EQ(m.EulerCharacteristic(), 1);
    EXPECT_NEAR(m.MaxH(), std::sqrt(2.0) / s, 1e-14);
  }
}

TEST(Mesh, AreasPositiveAndSumToOne)
{
  const Mesh m = GenerateUnitSquare(3);
  double total = 0.0;
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    EXPECT_GT(m.Area(t), 0.0);
    total += m.Area(t);
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Mesh, BoundaryTags)
{
  const Mesh m = GenerateUnitSquare(2);
  int axis = 0, outer = 0;
  for (int e = 0; e < m.NumEdges(); e++)
  {
    const Point a = m.vertices[m.edges[e][0]], b = m.vertices[m.edges[e][1]];
    if (m.edge_tags[e] == BoundaryTag::Gamma0)
    {
      axis++;
      EXPECT_EQ(a[0], 0.0);
      EXPECT_EQ(b[0], 0.0);
    }
    else if (m.edge_tags[e] == BoundaryTag::Gamma1)
    {
      outer++;
      EXPECT_EQ(m.edge_tris[e][1], -1);
    }
  }
  EXPECT_EQ(axis, 4);
  EXPECT_EQ(outer, 12);
  for (int v = 0; v < m.NumVertices(); v++)
  {
    EXPECT_EQ(m.vertex_on_axis[v], m.vertices[v][0] == 0.0);
  }
}

TEST(Mesh, EdgeOrientationAndSigns)
{
  const Mesh m = GenerateUnitSquare(2);
  for (int e = 0; e < m.NumEdges(); e++)
  {
    EXPECT_LT(m.edges[e][0], m.edges[e][1]);
  }
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    for (int i = 0; i < 3; i++)
    {
      const int a = m.triangles[t][(i + 1) % 3], b = m.triangles[t][(i + 2) % 3];
      const int e = m.tri_edges[t][i];
      EXPECT_EQ(m.tri_edge_signs[t][i], a < b ? 1 : -1);
      EXPECT_EQ(std::min(a, b), m.edges[e][0]);
      EXPECT_EQ(std::max(a, b), m.edges[e][1]);
    }
  }
}

TEST(Mesh, RoundTripText)
{
  const Mesh m = GenerateUnitSquare(2);
  const Mesh back = ReadMeshString(WriteMeshString(m));
  ASSERT_EQ(back.NumVertices(), m.NumVertices());
  ASSERT_EQ(back.NumTriangles(), m.NumTriangles());
  for (int v = 0; v < m.NumVertices(); v++)
  {
    EXPECT_EQ(back.vertices[v], m.vertices[v]);
  }
  EXPECT_EQ(back.triangles, m.triangles);
}

TEST(Mesh, RefineMatchesNextLevel)
{
  const Mesh fine = RefineUniform(GenerateUnitSquare(1));
  EXPECT_EQ(fine.NumTriangles(), GenerateUnitSquare(2).NumTriangles());
  EXPECT_NEAR(fine.MaxH(), GenerateUnitSquare(2).MaxH(), 1e-14);
}

TEST(Mesh, LocatorFindsContainingTriangle)
{
  const Mesh m = GenerateUnitSquare(3);
  const TriangleLocator loc(m);
  for (int t = 0; t < m.NumTriangles(); t++)
  {
    const Point c = m.Centroid(t);
    EXPECT_EQ(loc.Locate(c), t);
    const auto lam = Barycentric(m, t, c);
    for (double l : lam)
      EXPECT_NEAR(l, 1.0 / 3.0, 1e-13);
  }
  EXPECT_EQ(loc.Locate({1.5, 0.5}), -1);
}

TEST(Mesh, RejectsMalformedInput)
{
  EXPECT_THROW(ReadMeshString("2 1\n0 0\n1 0\n0 1 2\n"), std::exception);
}
