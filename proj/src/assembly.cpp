// SPDX-License-Identifier: Apache-2.0

#include "ffem/assembly.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ffem/quadrature.hpp"

namespace ffem
{

namespace
{

using Triplet = Eigen::Triplet<double>;

double Dot(const Vec3 &a, const Vec3 &b, int nc)
{
  double s = 0.0;
  for (int c = 0; c < nc; c++)
  {
    s += a[c] * b[c];
  }
  return s;
}

}  // namespace

LinearOperator MassMatrix(const SpaceHandle &space, int degree)
{
  const Mesh &mesh = space.GetMesh();
  const int nc = NumComponents(space.Kind());
  const int nl = space.NumLocal();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.NumTriangles()) * nl * nl);
  const QuadRule &ref = TriangleRule(degree);
  std::array<int, 6> idx;
  std::array<double, 6> sgn;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const LocalBasis basis = BuildLocalBasis(space, t);
    const QuadRule rule = MapToTriangle(ref, mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
    double local[6][6] = {};
    for (int q = 0; q < rule.Size(); q++)
    {
      const BasisValues bv = EvalBasis(basis, rule.points[q]);
      const double w = rule.weights[q] * rule.points[q][0];
      for (int i = 0; i < nl; i++)
      {
        for (int j = 0; j < nl; j++)
        {
          local[i][j] += w * Dot(bv.phys[i], bv.phys[j], nc);
        }
      }
    }
    space.LocalDofs(t, idx, sgn);
    for (int i = 0; i < nl; i++)
    {
      for (int j = 0; j < nl; j++)
      {
        trips.emplace_back(idx[i], idx[j], sgn[i] * sgn[j] * local[i][j]);
      }
    }
  }
  LinearOperator op;
  op.domain = space;
  op.codomain = space;
  op.mat.resize(space.DofCount(), space.DofCount());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  return op;
}

LinearOperator DerivativeMatrix(const SpaceHandle &from)
{
  if (from.Kind() == SpaceKind::D)
  {
    throw std::invalid_argument("no derivative matrix out of D");
  }
  const SpaceHandle to = NextSpace(from);
  const Mesh &mesh = from.GetMesh();
  const int nl_from = from.NumLocal();
  const int nl_to = to.NumLocal();
  std::vector<Triplet> trips;
  std::array<int, 6> idx_from, idx_to;
  std::array<double, 6> sgn_from, sgn_to;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    // Codomain DOFs are evaluated on one owner triangle per entity since traces of the
    // image on an entity depend only on DOFs in its closure.
    std::array<bool, 6> owned{};
    for (int c = 0; c < nl_to; c++)
    {
      const bool is_vertex =
          (to.Kind() == SpaceKind::B && c < 3) || (to.Kind() == SpaceKind::A);
      const bool is_edge = (to.Kind() == SpaceKind::B && c >= 3) || (to.Kind() == SpaceKind::C && c < 3);
      if (is_vertex)
      {
        owned[c] = mesh.vertex_owner_tri[mesh.triangles[t][c]] == t;
      }
      else if (is_edge)
      {
        const int le = (to.Kind() == SpaceKind::B) ? c - 3 : c;
        owned[c] = mesh.edge_tris[mesh.tri_edges[t][le]][0] == t;
      }
      else
      {
        owned[c] = true;
      }
    }
    const LocalBasis basis = BuildLocalBasis(from, t);
    from.LocalDofs(t, idx_from, sgn_from);
    to.LocalDofs(t, idx_to, sgn_to);
    for (int g = 0; g < nl_from; g++)
    {
      const auto vals = ApplyLocalDofs(to.Kind(), mesh, t, basis.dreg[g]);
      for (int c = 0; c < nl_to; c++)
      {
        if (owned[c] && vals[c] != 0.0)
        {
          trips.emplace_back(idx_to[c], idx_from[g], sgn_to[c] * sgn_from[g] * vals[c]);
        }
      }
    }
  }
  LinearOperator op;
  op.domain = from;
  op.codomain = to;
  op.mat.resize(to.DofCount(), from.DofCount());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.mat.prune(0.0);
  return op;
}

Eigen::VectorXd LoadVector(const SpaceHandle &space, const AnalyticField &f, int degree)
{
  const Mesh &mesh = space.GetMesh();
  const int nc = NumComponents(space.Kind());
  if (nc != f.components)
  {
    throw std::invalid_argument("load field component count does not match the space");
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.DofCount());
  const QuadRule &ref = TriangleRule(degree);
  std::array<int, 6> idx;
  std::array<double, 6> sgn;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const LocalBasis basis = BuildLocalBasis(space, t);
    const QuadRule rule = MapToTriangle(ref, mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
    space.LocalDofs(t, idx, sgn);
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point &p = rule.points[q];
      const Vec3 fv = f.value(p[0], p[1]);
      const BasisValues bv = EvalBasis(basis, p);
      const double w = rule.weights[q] * p[0];
      for (int i = 0; i < basis.size; i++)
      {
        b[idx[i]] += sgn[i] * w * Dot(fv, bv.phys[i], nc);
      }
    }
  }
  return b;
}

ContinuousOp ParseContinuousOp(const std::string &name)
{
  if (name == "grad")
    return ContinuousOp::Grad;
  if (name == "curl")
    return ContinuousOp::Curl;
  if (name == "div")
    return ContinuousOp::Div;
  if (name == "grad*")
    return ContinuousOp::GradStar;
  if (name == "curl*")
    return ContinuousOp::CurlStar;
  if (name == "div*")
    return ContinuousOp::DivStar;
  throw std::invalid_argument("unknown operator: " + name);
}

const char *ContinuousOpName(ContinuousOp op)
{
  switch (op)
  {
    case ContinuousOp::Grad:
      return "grad";
    case ContinuousOp::Curl:
      return "curl";
    case ContinuousOp::Div:
      return "div";
    case ContinuousOp::GradStar:
      return "grad*";
    case ContinuousOp::CurlStar:
      return "curl*";
    case ContinuousOp::DivStar:
      return "div*";
  }
  return "?";
}

Vec3 ApplyOperatorPointwise(ContinuousOp op, int n, double r, const Vec3 &u, const Vec3 &ur,
                            const Vec3 &uz)
{
  switch (op)
  {
    case ContinuousOp::Grad:
      return {ur[0], -n * u[0] / r, uz[0]};
    case ContinuousOp::GradStar:
      return {ur[0], n * u[0] / r, uz[0]};
    case ContinuousOp::Curl:
      return {-(n * u[2] / r + uz[1]), uz[0] - ur[2], (n * u[0] + u[1]) / r + ur[1]};
    case ContinuousOp::CurlStar:
      return {n * u[2] / r - uz[1], uz[0] - ur[2], (-n * u[0] + u[1]) / r + ur[1]};
    case ContinuousOp::Div:
      return {ur[0] + (u[0] - n * u[1]) / r + uz[2], 0.0, 0.0};
    case ContinuousOp::DivStar:
      return {ur[0] + (u[0] + n * u[1]) / r + uz[2], 0.0, 0.0};
  }
  return {};
}

AnalyticField ApplyContinuousOperator(ContinuousOp op, int n, const AnalyticField &u)
{
  if (!u.value || !u.partials)
  {
    throw std::invalid_argument("operator application needs value and partial callbacks");
  }
  const bool scalar_in = (op == ContinuousOp::Grad || op == ContinuousOp::GradStar);
  if (scalar_in != (u.components == 1))
  {
    throw std::invalid_argument("operator applied to a field with the wrong rank");
  }
  AnalyticField out;
  out.components = (op == ContinuousOp::Div || op == ContinuousOp::DivStar) ? 1 : 3;
  out.value = [op, n, u](double r, double z)
  {
    const auto d = u.partials(r, z);
    return ApplyOperatorPointwise(op, n, r, u.value(r, z), d[0], d[1]);
  };
  return out;
}

double InnerProductR(const Mesh &mesh, const AnalyticField &a, const AnalyticField &b,
                     int degree)
{
  const QuadRule &ref = TriangleRule(degree);
  const int nc = std::max(a.components, b.components);
  double s = 0.0;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const QuadRule rule = MapToTriangle(ref, mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point &p = rule.points[q];
      s += rule.weights[q] * p[0] * Dot(a.value(p[0], p[1]), b.value(p[0], p[1]), nc);
    }
  }
  return s;
}

double AdjointCheck(int k, int n, const Mesh &mesh, const AnalyticField &u,
                    const AnalyticField &v, int degree)
{
  if (k < 0 || k > 2)
  {
    throw std::invalid_argument("adjoint check needs k in 0..2");
  }
  static const ContinuousOp d_ops[] = {ContinuousOp::Grad, ContinuousOp::Curl, ContinuousOp::Div};
  static const ContinuousOp dual_ops[] = {ContinuousOp::DivStar, ContinuousOp::CurlStar,
                                          ContinuousOp::GradStar};
  // delta_1 = -div*, delta_2 = curl*, delta_3 = -grad*.
  static const double dual_sign[] = {-1.0, 1.0, -1.0};
  const AnalyticField du = ApplyContinuousOperator(d_ops[k], n, u);
  const AnalyticField dv = ApplyContinuousOperator(dual_ops[k], n, v);
  const double lhs = InnerProductR(mesh, du, v, degree);
  const double rhs = dual_sign[k] * InnerProductR(mesh, u, dv, degree);
  return std::abs(lhs - rhs);
}

void WriteMatrix(std::ostream &os, const SparseMatrix &m)
{
  os << "%" << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  os << std::setprecision(17);
  for (int j = 0; j < m.outerSize(); j++)
  {
    for (SparseMatrix::InnerIterator it(m, j); it; ++it)
    {
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
    }
  }
}

}  // namespace ffem
