// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_FEMSPACE_HPP
#define FFEM_FEMSPACE_HPP

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ffem/mesh.hpp"
#include "ffem/poly.hpp"

namespace ffem
{

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// Form degree: A (0), B (1), C (2), D (3).
enum class SpaceKind
{
  A = 0,
  B = 1,
  C = 2,
  D = 3
};

inline int FormDegree(SpaceKind k) { return static_cast<int>(k); }
inline SpaceKind KindOfDegree(int k) { return static_cast<SpaceKind>(k); }
const char *KindName(SpaceKind k);
inline int NumComponents(SpaceKind k) { return (k == SpaceKind::B || k == SpaceKind::C) ? 3 : 1; }

// Regular variables. Each space is described by axis-regular quantities:
//   A: w = n u / r
//   B: (t, p, q) = (u_theta, (n u_r + u_theta) / r, n u_z / r)
//   C: (u_r, c, u_z) with c = (n u_theta - u_r) / r
//   D: u
// The exterior derivative in these variables involves no division by r.

// Lowest-order space on a mesh at a fixed Fourier mode.
class SpaceHandle
{
public:
  SpaceHandle() = default;
  SpaceHandle(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int n);

  SpaceKind Kind() const { return kind_; }
  int Degree() const { return FormDegree(kind_); }
  int Mode() const { return n_; }
  const Mesh &GetMesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> MeshPtr() const { return mesh_; }
  int DofCount() const { return dof_count_; }
  int NumLocal() const;

  // Global index and orientation sign of each local basis function on triangle t.
  void LocalDofs(int t, std::array<int, 6> &index, std::array<double, 6> &sign) const;

  int VertexDof(int v) const;
  int EdgeDof(int e) const;
  int TriangleDof(int t) const;

  bool SameAs(const SpaceHandle &o) const
  {
    return mesh_ == o.mesh_ && kind_ == o.kind_ && n_ == o.n_;
  }

private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_ = SpaceKind::A;
  int n_ = 1;
  int dof_count_ = 0;
};

SpaceHandle BuildSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int n);

// Next space in the sequence (A -> B -> C -> D).
SpaceHandle NextSpace(const SpaceHandle &space);

// Discrete k-form: coefficients in the global basis of a space.
struct Field
{
  SpaceHandle space;
  Eigen::VectorXd coeffs;

  Field() = default;
  explicit Field(const SpaceHandle &s) : space(s), coeffs(Eigen::VectorXd::Zero(s.DofCount()))
  {
  }
  Field(const SpaceHandle &s, Eigen::VectorXd c) : space(s), coeffs(std::move(c)) {}
};

// Barycentric coordinates of triangle t as affine polynomials.
std::array<Poly, 3> BarycentricPolys(const Mesh &mesh, int t);

// Local basis of one triangle (local orientation, unsigned) with derivative images.
struct LocalBasis
{
  SpaceKind kind = SpaceKind::A;
  int n = 1;
  int size = 0;
  std::array<PolyVec, 6> reg;    // regular variables
  std::array<PolyVec, 6> phys;   // (u_r, u_theta, u_z) or scalar
  std::array<PolyVec, 6> dreg;   // regular variables of the derivative image
  std::array<PolyVec, 6> dphys;  // physical components of the derivative image
};

LocalBasis BuildLocalBasis(const SpaceHandle &space, int t);

// Conversions between regular and physical polynomial representations.
PolyVec RegularToPhysical(SpaceKind kind, int n, const PolyVec &reg);
PolyVec PhysicalToRegular(SpaceKind kind, int n, const PolyVec &phys);

// Derivative images computed in regular variables and, independently, by the
// cylindrical operator formulas applied to physical components.
PolyVec RegularDerivative(SpaceKind kind, const PolyVec &reg);
PolyVec PhysicalDerivative(SpaceKind kind, int n, const PolyVec &phys);

// Pointwise conversion of regular values to physical values.
Vec3 RegularToPhysicalValue(SpaceKind kind, int n, double r, const Vec3 &reg);

// Local DOF functionals (local orientation) applied to a polynomial in regular variables.
std::array<double, 6> ApplyLocalDofs(SpaceKind kind, const Mesh &mesh, int t,
                                     const PolyVec &reg);

// Values of the local basis (and optionally its derivative images) at a point.
struct BasisValues
{
  int size = 0;
  std::array<Vec3, 6> phys{};
  std::array<Vec3, 6> reg{};
  std::array<Vec3, 6> dphys{};
  std::array<Vec3, 6> dreg{};
};
BasisValues EvalBasis(const SpaceHandle &space, int t, const Point &p, bool images = false);
BasisValues EvalBasis(const LocalBasis &basis, const Point &p, bool images = false);

// Evaluate a discrete field on triangle t at p (p may lie outside t: the element
// polynomial is continued).
struct FieldValue
{
  Vec3 phys{};
  Vec3 reg{};
};
FieldValue EvalField(const Field &field, int t, const Point &p);

// Restriction of a discrete field to triangle t as polynomials.
struct LocalFieldPolys
{
  PolyVec phys;
  PolyVec reg;
};
LocalFieldPolys FieldPolys(const Field &field, int t);

// Local duality check: max |L_i(phi_j) - delta_ij| over all triangles.
double LocalDualityError(const SpaceHandle &space);

}  // namespace ffem

#endif  // FFEM_FEMSPACE_HPP
