// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_PROJLAB_HPP
#define FFEM_PROJLAB_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ffem/analytic.hpp"
#include "ffem/assembly.hpp"
#include "ffem/mesh.hpp"

namespace ffem
{

// Smoothing domain of one vertex with its discrete weights mu_q = w_q r(y_q)^3 eta(y_q).
struct VertexDisk
{
  Point center{};
  bool half = false;
  double rho = 0.0;
  double scale = 1.0;  // r-scaling s of the reference moment system
  std::vector<Point> points;
  std::vector<double> mu;
  Eigen::VectorXd eta_coef;  // eta in monomials of (y - a)/rho, divided by rho^2 s^3
  double gram_condition = 0.0;

  // eta_a(y) for a point of the disk.
  double Eta(const Point &y, int degree) const;
};

struct SmoothingOptions
{
  double delta = 0.1;
  int eta_degree = 1;
  int radial = 0;        // 0 selects the smallest rule exact for the moment system
  int angular = 0;       // full disks, uniform angles
  int half_angular = 0;  // half disks, Gauss-Legendre angles
  bool auto_shrink = true;
  int max_halvings = 12;
};

struct SmoothingConfig
{
  std::shared_ptr<const Mesh> mesh;
  double delta = 0.1;
  double delta_requested = 0.1;
  int halvings = 0;
  int eta_degree = 1;
  double h = 0.0;
  double rho = 0.0;
  int radial = 0, angular = 0, half_angular = 0;
  std::vector<VertexDisk> disks;
  std::vector<std::string> violations_at_request;
};

// Selection rules for disks of radius delta * h: containment in the vertex patch,
// disjointness and r_a >= delta h. Returns one message per violation.
std::vector<std::string> CheckSelectionRules(const Mesh &mesh, double delta);

// Halves delta until the selection rules hold (when allowed) and builds every disk.
SmoothingConfig BuildSmoothingConfig(std::shared_ptr<const Mesh> mesh,
                                     const SmoothingOptions &opts = {});

// One disk: moment system G c = e on the reference (half) disk.
VertexDisk BuildEta(const Point &a, bool half, double rho, int degree, int radial, int angular);

// max over monomials p of degree <= l of |sum_q mu_q p(y_q) - p(a)|; with `refine` the
// integral of r^3 eta p is recomputed on a rule with twice the points in each direction.
double EtaMomentError(const VertexDisk &disk, int degree, bool refine = false);

// Rows: smoothed DOFs of R_h = I o S; columns: basis functions of the space. Discrete
// fields are extended across r = 1, z = 0 and z = 1 by reflection pullback.
SparseMatrix SmoothedDofMatrix(const SpaceHandle &space, const SmoothingConfig &cfg);

// Smoothed DOFs of a smooth field given by its regular variables; the formulas are
// evaluated outside the domain.
Eigen::VectorXd SmoothedDofs(const SpaceHandle &space, const SmoothForm &u,
                             const SmoothingConfig &cfg, int degree = 8);

// Vertex DOF from the full triple-disk sum with x~ evaluated at the vertex inside an
// incident triangle; A and B spaces only.
double LiteralVertexDof(const SpaceHandle &space, const SmoothForm &u, const SmoothingConfig &cfg,
                        int vertex);

// Mass-weighted operator norm |A|_M = |L^T A L^{-T}|_2 with M = L L^T.
double MassNorm(const Eigen::MatrixXd &mass, const Eigen::MatrixXd &a);

struct ProjectionOperator
{
  SpaceHandle space;
  SmoothingConfig cfg;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd r;  // R_h restricted to V_h
  Eigen::MatrixXd j;  // inverse of r
  double neumann = 0.0;        // |r - I|_M
  double j_norm = 0.0;         // |J|_M
  double inverse_error = 0.0;  // max |J r - I|

  Eigen::VectorXd Apply(const SmoothForm &u, int degree = 8) const;
  Eigen::VectorXd ApplyDiscrete(const Eigen::VectorXd &coeffs) const;
};

ProjectionOperator BuildProjection(const SpaceHandle &space, const SmoothingConfig &cfg);

// Records for JSON reports.
struct CheckRecord
{
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

// Per-triangle maxima of the four inverse-inequality ratios on one mesh.
struct InverseRatios
{
  double inv1 = 0.0;  // h_K^2 |grad v|^2 / |v|^2 (weighted)
  double inv2 = 0.0;  // h_K^2 |grad v|_inf^2 / |v|_inf^2
  double inv3 = 0.0;  // r_K h_K^2 |v|_inf^2 / |v|^2_r
  double inv4 = 0.0;  // r_K^2 |u/r|^2_r / |u|^2_r, u = r p on axis triangles
};
InverseRatios MeasureInverseRatios(const Mesh &mesh, int degree, int samples, std::uint64_t seed);

// Reference ratio of (inv3) for v = 1 on the triangle (0,0), (1,0), (0,1).
double ReferenceInv3ConstantRatio();

// Test fields: regular potentials for the given space built from (r z, r^2, z).
SmoothForm PolynomialTestForm(SpaceKind kind, int n);
// Smooth but non-polynomial field for continuity ratios.
SmoothForm SmoothTestForm(SpaceKind kind, int n);

}  // namespace ffem

#endif  // FFEM_PROJLAB_HPP
