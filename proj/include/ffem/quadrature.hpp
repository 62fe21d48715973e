// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_QUADRATURE_HPP
#define FFEM_QUADRATURE_HPP

#include <array>
#include <vector>

#include "ffem/mesh.hpp"

namespace ffem
{

struct QuadRule
{
  std::vector<Point> points;
  std::vector<double> weights;
  int exact_degree = 0;

  int Size() const { return static_cast<int>(weights.size()); }
};

// Gauss-Legendre nodes and weights on [0, 1].
void GaussLegendre01(int n, std::vector<double> &x, std::vector<double> &w);

// Rule on the reference triangle (0,0), (1,0), (0,1), exact for total degree <= degree.
const QuadRule &TriangleRule(int degree);

// Rule on [0, 1] stored as (s, 0) points, exact for degree <= degree. Nodes are
// strictly interior.
const QuadRule &EdgeRule(int degree);

// Polar product rule on the unit disk (or the half disk r >= 0): Gauss-Legendre in the
// radius times uniform angles (full disk) or Gauss-Legendre angles (half disk). The
// result is shifted to center and scaled by radius.
QuadRule DiskRule(int radial_points, int angular_points, bool half, Point center = {0.0, 0.0},
                  double radius = 1.0);

// Map a reference-triangle rule onto triangle t; weights include the area factor.
QuadRule MapToTriangle(const QuadRule &ref, const Point &a, const Point &b, const Point &c);

}  // namespace ffem

#endif  // FFEM_QUADRATURE_HPP
