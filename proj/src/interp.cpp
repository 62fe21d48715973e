// SPDX-License-Identifier: Apache-2.0

#include "ffem/interp.hpp"

#include <cmath>
#include <stdexcept>

#include "ffem/assembly.hpp"
#include "ffem/quadrature.hpp"

namespace ffem
{

namespace
{

double TriangleMean(const Mesh &mesh, int t, const QuadRule &ref,
                    const std::function<double(double, double)> &f)
{
  const QuadRule rule = MapToTriangle(ref, mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
  double s = 0.0;
  for (int q = 0; q < rule.Size(); q++)
  {
    s += rule.weights[q] * f(rule.points[q][0], rule.points[q][1]);
  }
  return s / mesh.Area(t);
}

bool TriangleTouchesAxis(const Mesh &mesh, int t)
{
  for (int v : mesh.triangles[t])
  {
    if (mesh.vertex_on_axis[v])
    {
      return true;
    }
  }
  return false;
}

}  // namespace

Field Interpolate(const SpaceHandle &space, const AnalyticField &u, int degree)
{
  const Mesh &mesh = space.GetMesh();
  const int n = space.Mode();
  const SpaceKind kind = space.Kind();
  if (!u.value)
  {
    throw std::invalid_argument("interpolation needs a value callback");
  }
  if (u.components != NumComponents(kind))
  {
    throw std::invalid_argument("field component count does not match the space");
  }
  Field f(space);
  const QuadRule &erule = EdgeRule(degree);
  const QuadRule &trule = TriangleRule(degree);

  if (kind == SpaceKind::A || kind == SpaceKind::B)
  {
    for (int v = 0; v < mesh.NumVertices(); v++)
    {
      const Point &a = mesh.vertices[v];
      if (kind == SpaceKind::A)
      {
        f.coeffs[v] = u.Regular(kind, n, a[0], a[1])[0];
      }
      else
      {
        f.coeffs[v] = u.value(a[0], a[1])[1];
      }
    }
  }
  if (kind == SpaceKind::B || kind == SpaceKind::C)
  {
    const bool normal = (kind == SpaceKind::C);
    for (int e = 0; e < mesh.NumEdges(); e++)
    {
      const Point &a = mesh.vertices[mesh.edges[e][0]];
      const Point &b = mesh.vertices[mesh.edges[e][1]];
      if (!normal && (a[0] == 0.0 || b[0] == 0.0) && !u.HasCombo(kind))
      {
        throw std::invalid_argument("edge DOF touches the axis but the field has no "
                                    "B-space combination");
      }
      const Vec2 d = {b[0] - a[0], b[1] - a[1]};
      const Vec2 dir = normal ? Vec2{-d[1], d[0]} : d;
      double s = 0.0;
      for (int q = 0; q < erule.Size(); q++)
      {
        const double x = erule.points[q][0];
        const double r = a[0] + x * d[0], z = a[1] + x * d[1];
        if (normal)
        {
          const Vec3 val = u.value(r, z);
          s += erule.weights[q] * (val[0] * dir[0] + val[2] * dir[1]);
        }
        else
        {
          const Vec3 reg = u.Regular(kind, n, r, z);
          s += erule.weights[q] * (reg[1] * dir[0] + reg[2] * dir[1]);
        }
      }
      f.coeffs[space.EdgeDof(e)] = s;
    }
  }
  if (kind == SpaceKind::C || kind == SpaceKind::D)
  {
    for (int t = 0; t < mesh.NumTriangles(); t++)
    {
      if (kind == SpaceKind::C)
      {
        if (TriangleTouchesAxis(mesh, t) && !u.HasCombo(kind))
        {
          throw std::invalid_argument("element DOF touches the axis but the field has no "
                                      "C-space combination");
        }
        f.coeffs[space.TriangleDof(t)] = TriangleMean(
            mesh, t, trule, [&](double r, double z) { return u.Regular(kind, n, r, z)[1]; });
      }
      else
      {
        f.coeffs[space.TriangleDof(t)] =
            TriangleMean(mesh, t, trule, [&](double r, double z) { return u.value(r, z)[0]; });
      }
    }
  }
  return f;
}

double CommutingDiagramResidual(const SpaceHandle &space, const SmoothForm &u, int degree)
{
  if (space.Kind() == SpaceKind::D)
  {
    throw std::invalid_argument("commuting residual needs k in 0..2");
  }
  const Field iu = Interpolate(space, u.Analytic(), degree);
  const Field idu = Interpolate(NextSpace(space), u.Derivative().Analytic(), degree);
  const LinearOperator d = DerivativeMatrix(space);
  return (d.mat * iu.coeffs - idu.coeffs).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd L2rErrorSquaredPerTriangle(const Field &numeric, const AnalyticField &exact,
                                           int degree)
{
  const Mesh &mesh = numeric.space.GetMesh();
  const int nc = NumComponents(numeric.space.Kind());
  const QuadRule &ref = TriangleRule(degree);
  Eigen::VectorXd e2(mesh.NumTriangles());
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const LocalFieldPolys fp = FieldPolys(numeric, t);
    const QuadRule rule = MapToTriangle(ref, mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
    double s = 0.0;
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point &p = rule.points[q];
      const Vec3 ex = exact.value(p[0], p[1]);
      double d2 = 0.0;
      for (int c = 0; c < nc; c++)
      {
        const double d = fp.phys[c](p[0], p[1]) - ex[c];
        d2 += d * d;
      }
      s += rule.weights[q] * p[0] * d2;
    }
    e2[t] = s;
  }
  return e2;
}

double L2rError(const Field &numeric, const AnalyticField &exact, int degree)
{
  return std::sqrt(L2rErrorSquaredPerTriangle(numeric, exact, degree).sum());
}

double L2rError(const Mesh &mesh, const AnalyticField &numeric, const AnalyticField &exact,
                int degree)
{
  const QuadRule &ref = TriangleRule(degree);
  const int nc = std::max(numeric.components, exact.components);
  double s = 0.0;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const QuadRule rule = MapToTriangle(ref, mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point &p = rule.points[q];
      const Vec3 a = numeric.value(p[0], p[1]), b = exact.value(p[0], p[1]);
      double d2 = 0.0;
      for (int c = 0; c < nc; c++)
      {
        d2 += (a[c] - b[c]) * (a[c] - b[c]);
      }
      s += rule.weights[q] * p[0] * d2;
    }
  }
  return std::sqrt(s);
}

double L2rNorm(const Field &f, int degree)
{
  return L2rError(f, ZeroField(NumComponents(f.space.Kind())), degree);
}

double L2rDifference(const Field &fine, const Field &coarse, int degree)
{
  const Mesh &fm = fine.space.GetMesh();
  const Mesh &cm = coarse.space.GetMesh();
  if (fine.space.Kind() != coarse.space.Kind())
  {
    throw std::invalid_argument("difference of fields in different spaces");
  }
  const int nc = NumComponents(fine.space.Kind());
  const TriangleLocator locator(cm);
  const QuadRule &ref = TriangleRule(degree);
  double s = 0.0;
  for (int t = 0; t < fm.NumTriangles(); t++)
  {
    const int tc = locator.Locate(fm.Centroid(t));
    if (tc < 0)
    {
      throw std::runtime_error("fine triangle not covered by the coarse mesh");
    }
    const LocalFieldPolys pf = FieldPolys(fine, t);
    const LocalFieldPolys pc = FieldPolys(coarse, tc);
    const QuadRule rule = MapToTriangle(ref, fm.Vertex(t, 0), fm.Vertex(t, 1), fm.Vertex(t, 2));
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point &p = rule.points[q];
      double d2 = 0.0;
      for (int c = 0; c < nc; c++)
      {
        const double d = pf.phys[c](p[0], p[1]) - pc.phys[c](p[0], p[1]);
        d2 += d * d;
      }
      s += rule.weights[q] * p[0] * d2;
    }
  }
  return std::sqrt(s);
}

}  // namespace ffem
