// SPDX-License-Identifier: Apache-2.0

#include "ffem/femspace.hpp"

#include <cmath>
#include <stdexcept>

#include "ffem/quadrature.hpp"

namespace ffem
{

const char *KindName(SpaceKind k)
{
  switch (k)
  {
    case SpaceKind::A:
      return "A";
    case SpaceKind::B:
      return "B";
    case SpaceKind::C:
      return "C";
    case SpaceKind::D:
      return "D";
  }
  return "?";
}

SpaceHandle::SpaceHandle(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int n)
  : mesh_(std::move(mesh)), kind_(kind), n_(n)
{
  if (!mesh_)
  {
    throw std::invalid_argument("space requires a mesh");
  }
  if (n < 1)
  {
    throw std::invalid_argument("Fourier mode must be at least 1");
  }
  const Mesh &m = *mesh_;
  switch (kind_)
  {
    case SpaceKind::A:
      dof_count_ = m.NumVertices();
      break;
    case SpaceKind::B:
      dof_count_ = m.NumVertices() + m.NumEdges();
      break;
    case SpaceKind::C:
      dof_count_ = m.NumEdges() + m.NumTriangles();
      break;
    case SpaceKind::D:
      dof_count_ = m.NumTriangles();
      break;
  }
}

int SpaceHandle::NumLocal() const
{
  switch (kind_)
  {
    case SpaceKind::A:
      return 3;
    case SpaceKind::B:
      return 6;
    case SpaceKind::C:
      return 4;
    case SpaceKind::D:
      return 1;
  }
  return 0;
}

int SpaceHandle::VertexDof(int v) const
{
  if (kind_ != SpaceKind::A && kind_ != SpaceKind::B)
  {
    throw std::logic_error("space has no vertex DOFs");
  }
  return v;
}

int SpaceHandle::EdgeDof(int e) const
{
  if (kind_ == SpaceKind::B)
  {
    return mesh_->NumVertices() + e;
  }
  if (kind_ == SpaceKind::C)
  {
    return e;
  }
  throw std::logic_error("space has no edge DOFs");
}

int SpaceHandle::TriangleDof(int t) const
{
  if (kind_ == SpaceKind::C)
  {
    return mesh_->NumEdges() + t;
  }
  if (kind_ == SpaceKind::D)
  {
    return t;
  }
  throw std::logic_error("space has no element DOFs");
}

void SpaceHandle::LocalDofs(int t, std::array<int, 6> &index, std::array<double, 6> &sign) const
{
  const Mesh &m = *mesh_;
  if (t < 0 || t >= m.NumTriangles())
  {
    throw std::out_of_range("unknown triangle");
  }
  const auto &tv = m.triangles[t];
  const auto &te = m.tri_edges[t];
  const auto &ts = m.tri_edge_signs[t];
  sign.fill(1.0);
  switch (kind_)
  {
    case SpaceKind::A:
      for (int i = 0; i < 3; i++)
      {
        index[i] = tv[i];
      }
      break;
    case SpaceKind::B:
      for (int i = 0; i < 3; i++)
      {
        index[i] = tv[i];
        index[3 + i] = m.NumVertices() + te[i];
        sign[3 + i] = ts[i];
      }
      break;
    case SpaceKind::C:
      for (int i = 0; i < 3; i++)
      {
        index[i] = te[i];
        sign[i] = ts[i];
      }
      index[3] = m.NumEdges() + t;
      break;
    case SpaceKind::D:
      index[0] = t;
      break;
  }
}

SpaceHandle BuildSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int n)
{
  return SpaceHandle(std::move(mesh), kind, n);
}

SpaceHandle NextSpace(const SpaceHandle &space)
{
  if (space.Kind() == SpaceKind::D)
  {
    throw std::invalid_argument("D has no successor space");
  }
  return SpaceHandle(space.MeshPtr(), KindOfDegree(space.Degree() + 1), space.Mode());
}

std::array<Poly, 3> BarycentricPolys(const Mesh &mesh, int t)
{
  const double two_area = 2.0 * mesh.Area(t);
  std::array<Poly, 3> lam;
  for (int i = 0; i < 3; i++)
  {
    const Point b = mesh.Vertex(t, (i + 1) % 3), c = mesh.Vertex(t, (i + 2) % 3);
    lam[i] = Poly::Affine((b[0] * c[1] - c[0] * b[1]) / two_area, (b[1] - c[1]) / two_area,
                          (c[0] - b[0]) / two_area);
  }
  return lam;
}

PolyVec RegularToPhysical(SpaceKind kind, int n, const PolyVec &reg)
{
  const double inv_n = 1.0 / n;
  PolyVec phys;
  switch (kind)
  {
    case SpaceKind::A:
      phys[0] = reg[0].TimesR() * inv_n;
      break;
    case SpaceKind::B:
      phys[0] = (reg[1].TimesR() - reg[0]) * inv_n;
      phys[1] = reg[0];
      phys[2] = reg[2].TimesR() * inv_n;
      break;
    case SpaceKind::C:
      phys[0] = reg[0];
      phys[1] = (reg[1].TimesR() + reg[0]) * inv_n;
      phys[2] = reg[2];
      break;
    case SpaceKind::D:
      phys[0] = reg[0];
      break;
  }
  return phys;
}

PolyVec PhysicalToRegular(SpaceKind kind, int n, const PolyVec &phys)
{
  PolyVec reg;
  switch (kind)
  {
    case SpaceKind::A:
      reg[0] = (phys[0] * static_cast<double>(n)).DivideByR();
      break;
    case SpaceKind::B:
      reg[0] = phys[1];
      reg[1] = (phys[0] * static_cast<double>(n) + phys[1]).DivideByR();
      reg[2] = (phys[2] * static_cast<double>(n)).DivideByR();
      break;
    case SpaceKind::C:
      reg[0] = phys[0];
      reg[1] = (phys[1] * static_cast<double>(n) - phys[0]).DivideByR();
      reg[2] = phys[2];
      break;
    case SpaceKind::D:
      reg[0] = phys[0];
      break;
  }
  return reg;
}

PolyVec RegularDerivative(SpaceKind kind, const PolyVec &reg)
{
  PolyVec d;
  switch (kind)
  {
    case SpaceKind::A:
      d[0] = -reg[0];
      d[1] = reg[0].Dr();
      d[2] = reg[0].Dz();
      break;
    case SpaceKind::B:
      d[0] = -(reg[2] + reg[0].Dz());
      d[1] = reg[1].Dz() - reg[2].Dr();
      d[2] = reg[1] + reg[0].Dr();
      break;
    case SpaceKind::C:
      d[0] = reg[0].Dr() + reg[2].Dz() - reg[1];
      break;
    case SpaceKind::D:
      throw std::invalid_argument("D has no derivative");
  }
  return d;
}

PolyVec PhysicalDerivative(SpaceKind kind, int n, const PolyVec &u)
{
  const double nn = n;
  PolyVec d;
  switch (kind)
  {
    case SpaceKind::A:
      d[0] = u[0].Dr();
      d[1] = -(u[0] * nn).DivideByR();
      d[2] = u[0].Dz();
      break;
    case SpaceKind::B:
      d[0] = -((u[2] * nn).DivideByR() + u[1].Dz());
      d[1] = u[0].Dz() - u[2].Dr();
      d[2] = (u[0] * nn + u[1]).DivideByR() + u[1].Dr();
      break;
    case SpaceKind::C:
      d[0] = u[0].Dr() + (u[0] - u[1] * nn).DivideByR() + u[2].Dz();
      break;
    case SpaceKind::D:
      throw std::invalid_argument("D has no derivative");
  }
  return d;
}

Vec3 RegularToPhysicalValue(SpaceKind kind, int n, double r, const Vec3 &reg)
{
  const double inv_n = 1.0 / n;
  switch (kind)
  {
    case SpaceKind::A:
      return {r * reg[0] * inv_n, 0.0, 0.0};
    case SpaceKind::B:
      return {(r * reg[1] - reg[0]) * inv_n, reg[0], r * reg[2] * inv_n};
    case SpaceKind::C:
      return {reg[0], (r * reg[1] + reg[0]) * inv_n, reg[2]};
    case SpaceKind::D:
      return {reg[0], 0.0, 0.0};
  }
  return {};
}

LocalBasis BuildLocalBasis(const SpaceHandle &space, int t)
{
  const Mesh &mesh = space.GetMesh();
  const auto lam = BarycentricPolys(mesh, t);
  std::array<Vec2, 3> grad;
  for (int i = 0; i < 3; i++)
  {
    grad[i] = {lam[i].coef(1, 0), lam[i].coef(0, 1)};
  }
  // Whitney edge functions nu_i = lam_j grad lam_k - lam_k grad lam_j.
  std::array<std::array<Poly, 2>, 3> nu;
  for (int i = 0; i < 3; i++)
  {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    for (int c = 0; c < 2; c++)
    {
      nu[i][c] = lam[j] * grad[k][c] - lam[k] * grad[j][c];
    }
  }
  LocalBasis b;
  b.kind = space.Kind();
  b.n = space.Mode();
  b.size = space.NumLocal();
  switch (b.kind)
  {
    case SpaceKind::A:
      for (int i = 0; i < 3; i++)
      {
        b.reg[i][0] = lam[i];
      }
      break;
    case SpaceKind::B:
      for (int i = 0; i < 3; i++)
      {
        b.reg[i][0] = lam[i];
        b.reg[3 + i][1] = nu[i][0];
        b.reg[3 + i][2] = nu[i][1];
      }
      break;
    case SpaceKind::C:
      // xi_i is nu_i rotated by +pi/2.
      for (int i = 0; i < 3; i++)
      {
        b.reg[i][0] = -nu[i][1];
        b.reg[i][2] = nu[i][0];
      }
      b.reg[3][1] = Poly::Constant(1.0);
      break;
    case SpaceKind::D:
      b.reg[0][0] = Poly::Constant(1.0);
      break;
  }
  for (int i = 0; i < b.size; i++)
  {
    b.phys[i] = RegularToPhysical(b.kind, b.n, b.reg[i]);
    if (b.kind != SpaceKind::D)
    {
      b.dreg[i] = RegularDerivative(b.kind, b.reg[i]);
      b.dphys[i] = RegularToPhysical(KindOfDegree(FormDegree(b.kind) + 1), b.n, b.dreg[i]);
    }
  }
  return b;
}

std::array<double, 6> ApplyLocalDofs(SpaceKind kind, const Mesh &mesh, int t,
                                     const PolyVec &reg)
{
  std::array<double, 6> out{};
  const auto &erule = EdgeRule(8);
  auto edge_integral = [&](int i, bool normal)
  {
    const Point a = mesh.Vertex(t, (i + 1) % 3), b = mesh.Vertex(t, (i + 2) % 3);
    const Vec2 d = {b[0] - a[0], b[1] - a[1]};
    const Vec2 dir = normal ? Vec2{-d[1], d[0]} : d;
    const int c0 = normal ? 0 : 1;
    double s = 0.0;
    for (int q = 0; q < erule.Size(); q++)
    {
      const double x = erule.points[q][0];
      const double r = a[0] + x * d[0], z = a[1] + x * d[1];
      s += erule.weights[q] * (reg[c0](r, z) * dir[0] + reg[2](r, z) * dir[1]);
    }
    return s;
  };
  auto mean = [&](const Poly &p)
  {
    const QuadRule rule =
        MapToTriangle(TriangleRule(8), mesh.Vertex(t, 0), mesh.Vertex(t, 1), mesh.Vertex(t, 2));
    double s = 0.0;
    for (int q = 0; q < rule.Size(); q++)
    {
      s += rule.weights[q] * p(rule.points[q][0], rule.points[q][1]);
    }
    return s / mesh.Area(t);
  };
  switch (kind)
  {
    case SpaceKind::A:
      for (int i = 0; i < 3; i++)
      {
        const Point a = mesh.Vertex(t, i);
        out[i] = reg[0](a[0], a[1]);
      }
      break;
    case SpaceKind::B:
      for (int i = 0; i < 3; i++)
      {
        const Point a = mesh.Vertex(t, i);
        out[i] = reg[0](a[0], a[1]);
        out[3 + i] = edge_integral(i, false);
      }
      break;
    case SpaceKind::C:
      for (int i = 0; i < 3; i++)
      {
        out[i] = edge_integral(i, true);
      }
      out[3] = mean(reg[1]);
      break;
    case SpaceKind::D:
      out[0] = mean(reg[0]);
      break;
  }
  return out;
}

BasisValues EvalBasis(const LocalBasis &basis, const Point &p, bool images)
{
  BasisValues v;
  v.size = basis.size;
  const int nc = NumComponents(basis.kind);
  for (int i = 0; i < basis.size; i++)
  {
    for (int c = 0; c < nc; c++)
    {
      v.phys[i][c] = basis.phys[i][c](p[0], p[1]);
      v.reg[i][c] = basis.reg[i][c](p[0], p[1]);
    }
    if (images && basis.kind != SpaceKind::D)
    {
      const int nd = NumComponents(KindOfDegree(FormDegree(basis.kind) + 1));
      for (int c = 0; c < nd; c++)
      {
        v.dphys[i][c] = basis.dphys[i][c](p[0], p[1]);
        v.dreg[i][c] = basis.dreg[i][c](p[0], p[1]);
      }
    }
  }
  return v;
}

BasisValues EvalBasis(const SpaceHandle &space, int t, const Point &p, bool images)
{
  return EvalBasis(BuildLocalBasis(space, t), p, images);
}

FieldValue EvalField(const Field &field, int t, const Point &p)
{
  const LocalBasis basis = BuildLocalBasis(field.space, t);
  const BasisValues bv = EvalBasis(basis, p, false);
  std::array<int, 6> idx;
  std::array<double, 6> sgn;
  field.space.LocalDofs(t, idx, sgn);
  FieldValue fv;
  for (int i = 0; i < basis.size; i++)
  {
    const double c = sgn[i] * field.coeffs[idx[i]];
    for (int k = 0; k < 3; k++)
    {
      fv.phys[k] += c * bv.phys[i][k];
      fv.reg[k] += c * bv.reg[i][k];
    }
  }
  return fv;
}

LocalFieldPolys FieldPolys(const Field &field, int t)
{
  const LocalBasis basis = BuildLocalBasis(field.space, t);
  std::array<int, 6> idx;
  std::array<double, 6> sgn;
  field.space.LocalDofs(t, idx, sgn);
  LocalFieldPolys out;
  for (int i = 0; i < basis.size; i++)
  {
    const double c = sgn[i] * field.coeffs[idx[i]];
    for (int k = 0; k < 3; k++)
    {
      out.phys[k] += basis.phys[i][k] * c;
      out.reg[k] += basis.reg[i][k] * c;
    }
  }
  return out;
}

double LocalDualityError(const SpaceHandle &space)
{
  const Mesh &mesh = space.GetMesh();
  double err = 0.0;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const LocalBasis b = BuildLocalBasis(space, t);
    for (int j = 0; j < b.size; j++)
    {
      const auto dofs = ApplyLocalDofs(space.Kind(), mesh, t, b.reg[j]);
      for (int i = 0; i < b.size; i++)
      {
        err = std::max(err, std::abs(dofs[i] - (i == j ? 1.0 : 0.0)));
      }
    }
  }
  return err;
}

}  // namespace ffem
