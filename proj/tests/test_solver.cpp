// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <memory>

#include "ffem/interp.hpp"
#include "ffem/solver.hpp"
#include "ffem/suites.hpp"

using namespace ffem;

namespace
{
std::shared_ptr<const Mesh> UnitMesh(int level)
{
  return std::make_shared<const Mesh>(GenerateUnitSquare(level));
}
}  // namespace

TEST(Solver, ZeroDataGivesZero)
{
  for (int k = 1; k <= 3; k++)
  {
    const MixedSolution s = SolveMixed(UnitMesh(2), k, 2, ZeroField(k == 3 ? 1 : 3));
    EXPECT_EQ(s.sigma.coeffs.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.u.coeffs.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Solver, SystemSymmetric)
{
  for (int k = 1; k <= 3; k++)
  {
    const int n = k == 3 ? 1 : k == 2 ? 3 : 2;
    const MixedSystem sys = BuildMixedSystem(UnitMesh(2), k, n, BuiltinCase(k, n).f);
    EXPECT_LT(sys.SymmetryError(), 1e-12) << "k=" << k;
  }
}

TEST(Solver, DirectAndSchurCgAgree)
{
  SolverOptions cg;
  cg.method = SolveMethod::SchurCg;
  cg.tol = 1e-12;
  for (int k = 1; k <= 3; k++)
  {
    const int n = k == 3 ? 1 : k == 2 ? 3 : 2;
    const ManufacturedCase mc = BuiltinCase(k, n);
    auto mesh = UnitMesh(3);
    const MixedSolution a = SolveMixed(mesh, k, n, mc.f);
    const MixedSolution b = SolveMixed(mesh, k, n, mc.f, cg);
    const double scale = std::max(1.0, a.u.coeffs.cwiseAbs().maxCoeff());
    EXPECT_LT((a.u.coeffs - b.u.coeffs).cwiseAbs().maxCoeff() / scale, 1e-7) << "k=" << k;
    EXPECT_LT((a.sigma.coeffs - b.sigma.coeffs).cwiseAbs().maxCoeff() / scale, 1e-7);
    EXPECT_GT(b.stats.outer_iterations, 0);
  }
}

TEST(Solver, GalerkinResidual)
{
  for (int k = 1; k <= 3; k++)
  {
    const int n = k == 3 ? 1 : k == 2 ? 3 : 2;
    const MixedSystem sys = BuildMixedSystem(UnitMesh(3), k, n, BuiltinCase(k, n).f);
    const MixedSolution s = SolveMixed(sys);
    const auto res = sys.EquationResiduals(s.sigma.coeffs, s.u.coeffs);
    EXPECT_LT(res[0], 1e-9);
    EXPECT_LT(res[1], 1e-9);
  }
}

TEST(Solver, SaddleInertia)
{
  for (int k = 1; k <= 3; k++)
  {
    const MixedSystem sys = BuildMixedSystem(UnitMesh(1), k, 2, ZeroField(k == 3 ? 1 : 3));
    const Inertia in = SaddleInertia(sys);
    EXPECT_EQ(in.positive, sys.sigma_space.DofCount()) << "k=" << k;
    EXPECT_EQ(in.negative, sys.u_space.DofCount());
    EXPECT_EQ(in.zero, 0);
  }
}

TEST(Solver, IterationCapRaises)
{
  SolverOptions o;
  o.method = SolveMethod::SchurCg;
  o.max_iterations = 1;
  EXPECT_THROW(SolveMixed(UnitMesh(3), 3, 1, BuiltinCase(3, 1).f, o), SolverError);
}

TEST(Solver, MethodNames)
{
  EXPECT_EQ(ParseSolveMethod("direct"), SolveMethod::Direct);
  EXPECT_EQ(ParseSolveMethod("schur_cg"), SolveMethod::SchurCg);
  EXPECT_THROW(ParseSolveMethod("gmres"), std::exception);
}

TEST(Solver, JacobiCgSolvesSpd)
{
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  const CgResult r = JacobiCg([&](const Eigen::VectorXd &v, Eigen::VectorXd &out) { out = a * v; },
                              a.diagonal().cwiseInverse(), b, x, 1e-14, 100);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((a * x - b).norm(), 1e-12);
}

TEST(Solver, K0ProjectionConverges)
{
  const ManufacturedCase mc = BuiltinCase(0, 1, "r_sin_z");
  const auto rows = ConvergenceStudy(mc, 1, 4);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].err_sigma.has_value());
  EXPECT_GT(*rows[3].rate_u, 1.5);
}

TEST(Solver, ConvergenceStudyK3Rates)
{
  const auto rows = ConvergenceStudy(BuiltinCase(3, 1), 2, 5);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].rate_u.has_value());
  EXPECT_NEAR(*rows[3].rate_u, 1.0, 0.1);
  EXPECT_NEAR(*rows[3].rate_sigma, 1.0, 0.1);
}

TEST(Solver, ConsecutiveRateNeedsThreeLevels)
{
  EXPECT_ANY_THROW(ConsecutiveRate(2, 2));
  const SweepEntry e = ConsecutiveRate(2, 4);
  EXPECT_GT(e.diff_coarse, e.diff_fine);
  EXPECT_GT(e.rate, 1.5);
}

TEST(Solver, StabilityProxyBounded)
{
  const std::vector<double> s = StabilityProxy(2, 3, BuiltinCase(2, 3).f, 2, 5);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_LT(Drift(s), 1.5);
}
