// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_MMS_HPP
#define FFEM_MMS_HPP

#include <string>
#include <vector>

#include "ffem/analytic.hpp"
#include "ffem/assembly.hpp"

namespace ffem
{

struct ManufacturedCase
{
  int k = 0;
  int n = 1;
  std::string name;
  AnalyticField u;
  AnalyticField sigma;  // unused for k = 0
  bool has_sigma = false;
  AnalyticField f;
  std::string notes;
};

// Builtin cases: (3,1) "default", (2,3) "default" and "bubble", (1,2) "default",
// (0,1) "r_half", "r_two_thirds", "r_five_sixths", "r_sin_z".
ManufacturedCase BuiltinCase(int k, int n, const std::string &field = "default");
std::vector<std::string> BuiltinFieldNames(int k);

// Central differences with one Richardson step; needs r > 2 h.
Vec3 FdOperatorOracle(ContinuousOp op, int n, const AnalyticField &u, const Point &p,
                      double h = 1e-5);

// Max deviation of sigma - delta_k u and f - (d sigma + delta d u) at quasi-random
// points with r > r_min, using closed-form partials for the inner operator and finite
// differences for the outer one.
struct ConsistencyReport
{
  double sigma_residual = 0.0;
  double f_residual = 0.0;
  double partials_residual = 0.0;
};
ConsistencyReport CheckCaseConsistency(const ManufacturedCase &mc, int points = 200,
                                       double r_min = 0.05, double h = 1e-5);

// Halton points in [r_min, 1] x [0, 1].
std::vector<Point> QuasiRandomPoints(int count, double r_min);

// Right-hand side f = (0, r, 0) used for the Fourier-mode sweep.
AnalyticField SweepRhs();

}  // namespace ffem

#endif  // FFEM_MMS_HPP
