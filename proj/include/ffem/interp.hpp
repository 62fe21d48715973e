// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_INTERP_HPP
#define FFEM_INTERP_HPP

#include "ffem/analytic.hpp"
#include "ffem/femspace.hpp"

namespace ffem
{

// Canonical interpolant: DOF functionals evaluated with degree-`degree` rules.
Field Interpolate(const SpaceHandle &space, const AnalyticField &u, int degree = 8);

// ||D_k I_k u - I_{k+1} d u||_inf.
double CommutingDiagramResidual(const SpaceHandle &space, const SmoothForm &u, int degree = 8);

// ||numeric - exact|| in L^2_r, summed over components.
double L2rError(const Field &numeric, const AnalyticField &exact, int degree = 10);
double L2rError(const Mesh &mesh, const AnalyticField &numeric, const AnalyticField &exact,
                int degree = 10);
double L2rNorm(const Field &f, int degree = 10);

// Per-triangle squared errors (sums to L2rError^2).
Eigen::VectorXd L2rErrorSquaredPerTriangle(const Field &numeric, const AnalyticField &exact,
                                           int degree = 10);

// ||fine - coarse|| in L^2_r where the coarse mesh covers the same domain.
double L2rDifference(const Field &fine, const Field &coarse, int degree = 10);

}  // namespace ffem

#endif  // FFEM_INTERP_HPP
