// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_ASSEMBLY_HPP
#define FFEM_ASSEMBLY_HPP

#include <iosfwd>
#include <string>

#include <Eigen/Sparse>

#include "ffem/analytic.hpp"
#include "ffem/femspace.hpp"

namespace ffem
{

using SparseMatrix = Eigen::SparseMatrix<double>;

struct LinearOperator
{
  SparseMatrix mat;
  SpaceHandle domain;
  SpaceHandle codomain;
};

// (M)_ij = (phi_j, phi_i) in L^2_r.
LinearOperator MassMatrix(const SpaceHandle &space, int degree = 6);

// Coefficient map of d: A -> B (G), B -> C (C), C -> D (D).
LinearOperator DerivativeMatrix(const SpaceHandle &from);

// Entries (f, phi_i) in L^2_r.
Eigen::VectorXd LoadVector(const SpaceHandle &space, const AnalyticField &f, int degree = 10);

enum class ContinuousOp
{
  Grad,
  Curl,
  Div,
  GradStar,
  CurlStar,
  DivStar
};

ContinuousOp ParseContinuousOp(const std::string &name);
const char *ContinuousOpName(ContinuousOp op);

// Pointwise closed-form operator from values and first partials; the result needs r > 0.
Vec3 ApplyOperatorPointwise(ContinuousOp op, int n, double r, const Vec3 &u, const Vec3 &ur,
                            const Vec3 &uz);
AnalyticField ApplyContinuousOperator(ContinuousOp op, int n, const AnalyticField &u);

// |(d^k u, v)_r - (u, delta_{k+1} v)_r| on the mesh; a high-order rule is used.
double AdjointCheck(int k, int n, const Mesh &mesh, const AnalyticField &u,
                    const AnalyticField &v, int degree = 16);

// Coordinate text dump: header "%rows cols nnz" then "i j value" lines.
void WriteMatrix(std::ostream &os, const SparseMatrix &m);

// Weighted inner product of two analytic fields over the mesh.
double InnerProductR(const Mesh &mesh, const AnalyticField &a, const AnalyticField &b,
                     int degree);

}  // namespace ffem

#endif  // FFEM_ASSEMBLY_HPP
