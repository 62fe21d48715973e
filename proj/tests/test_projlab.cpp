// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "ffem/parallel.hpp"
#include "ffem/projlab.hpp"

using namespace ffem;

namespace
{
std::shared_ptr<const Mesh> UnitMesh(int level)
{
  return std::make_shared<const Mesh>(GenerateUnitSquare(level));
}
}  // namespace

TEST(ProjLab, ConstantEtaFarFromAxis)
{
  const double rho = 1e-3;
  const Point a{0.5, 0.5};
  const VertexDisk d = BuildEta(a, false, rho, 0, 4, 8);
  const double expected = 1.0 / (std::pow(a[0], 3) * std::numbers::pi * rho * rho);
  EXPECT_NEAR(d.Eta(a, 0) / expected, 1.0, 1e-5);
}

TEST(ProjLab, EtaMoments)
{
  for (int degree : {0, 1, 2})
  {
    const VertexDisk full = BuildEta({0.4, 0.3}, false, 0.05, degree, 8, 16);
    const VertexDisk half = BuildEta({0.0, 0.3}, true, 0.05, degree, 8, 24);
    EXPECT_LT(EtaMomentError(full, degree), 1e-12);
    EXPECT_LT(EtaMomentError(half, degree), 1e-12);
    EXPECT_LT(EtaMomentError(full, degree, true), 1e-10);
    EXPECT_LT(EtaMomentError(half, degree, true), 1e-10);
  }
}

TEST(ProjLab, SelectionRulesAndHalving)
{
  auto mesh = UnitMesh(2);
  EXPECT_TRUE(CheckSelectionRules(*mesh, 0.1).empty());
  EXPECT_FALSE(CheckSelectionRules(*mesh, 0.4).empty());
  SmoothingOptions o;
  o.delta = 0.4;
  const SmoothingConfig cfg = BuildSmoothingConfig(mesh, o);
  EXPECT_FALSE(cfg.violations_at_request.empty());
  EXPECT_LT(cfg.delta, 0.4);
  EXPECT_GE(cfg.halvings, 1);
  EXPECT_TRUE(CheckSelectionRules(*mesh, cfg.delta).empty());
  o.auto_shrink = false;
  EXPECT_THROW(BuildSmoothingConfig(mesh, o), std::exception);
}

TEST(ProjLab, SmoothedDofsOfZero)
{
  auto mesh = UnitMesh(2);
  const SmoothingConfig cfg = BuildSmoothingConfig(mesh);
  for (int k = 0; k <= 3; k++)
  {
    SmoothForm z;
    z.kind = KindOfDegree(k);
    z.n = 2;
    z.pot = {[](const Jet &, const Jet &) { return Jet::Constant(0.0); },
             [](const Jet &, const Jet &) { return Jet::Constant(0.0); },
             [](const Jet &, const Jet &) { return Jet::Constant(0.0); }};
    const Eigen::VectorXd v = SmoothedDofs(BuildSpace(mesh, z.kind, 2), z, cfg);
    EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(ProjLab, SmoothedDofsReproducePolynomials)
{
  auto mesh = UnitMesh(2);
  const SmoothingConfig cfg = BuildSmoothingConfig(mesh);
  for (int k = 0; k <= 2; k++)
  {
    const SpaceKind kind = KindOfDegree(k);
    const SpaceHandle s = BuildSpace(mesh, kind, 2);
    const SmoothForm u = PolynomialTestForm(kind, 2);
    const Eigen::VectorXd a = SmoothedDofs(s, u, cfg);
    const Eigen::VectorXd b = SmoothedDofs(NextSpace(s), u.Derivative(), cfg);
    const Eigen::VectorXd da = Eigen::MatrixXd(DerivativeMatrix(s).mat) * a;
    EXPECT_LT((da - b).cwiseAbs().maxCoeff(), 1e-10) << "k=" << k;
  }
}

TEST(ProjLab, DiscreteCommutation)
{
  auto mesh = UnitMesh(2);
  const SmoothingConfig cfg = BuildSmoothingConfig(mesh);
  for (int k = 0; k <= 2; k++)
  {
    const SpaceHandle s = BuildSpace(mesh, KindOfDegree(k), 3);
    const Eigen::MatrixXd d = Eigen::MatrixXd(DerivativeMatrix(s).mat);
    const Eigen::MatrixXd lhs = Eigen::MatrixXd(SmoothedDofMatrix(NextSpace(s), cfg)) * d;
    const Eigen::MatrixXd rhs = d * Eigen::MatrixXd(SmoothedDofMatrix(s, cfg));
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10) << "k=" << k;
  }
}

TEST(ProjLab, ProjectionIdentities)
{
  auto mesh = UnitMesh(2);
  const SmoothingConfig cfg = BuildSmoothingConfig(mesh);
  const ProjectionOperator p = BuildProjection(BuildSpace(mesh, SpaceKind::B, 2), cfg);
  const int n = p.space.DofCount();
  EXPECT_LT(p.inverse_error, 1e-10);
  EXPECT_LT((p.j * p.r - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(p.neumann, 1.0);
  EXPECT_LT(p.j_norm, 2.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; i++)
    x[i] = std::cos(0.9 * i);
  EXPECT_LT((p.ApplyDiscrete(x) - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjLab, LiteralVertexDofMatchesReduced)
{
  auto mesh = UnitMesh(2);
  const SmoothingConfig cfg = BuildSmoothingConfig(mesh);
  for (SpaceKind kind : {SpaceKind::A, SpaceKind::B})
  {
    const SpaceHandle s = BuildSpace(mesh, kind, 2);
    const SmoothForm u = SmoothTestForm(kind, 2);
    const Eigen::VectorXd reduced = SmoothedDofs(s, u, cfg);
    for (int v : {0, 6, 12, 24})
    {
      EXPECT_NEAR(LiteralVertexDof(s, u, cfg, v), reduced[s.VertexDof(v)], 1e-8);
    }
  }
}

TEST(ProjLab, MassNormOfIdentity)
{
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 0.5, 0.5, 1.0;
  EXPECT_NEAR(MassNorm(m, Eigen::MatrixXd::Identity(2, 2)), 1.0, 1e-14);
  EXPECT_NEAR(MassNorm(m, 3.0 * Eigen::MatrixXd::Identity(2, 2)), 3.0, 1e-14);
}

TEST(ProjLab, InverseReferenceConstant)
{
  EXPECT_NEAR(ReferenceInv3ConstantRatio(), 12.0, 1e-12);
}

TEST(ProjLab, InverseRatiosLevelIndependent)
{
  const InverseRatios a = MeasureInverseRatios(GenerateUnitSquare(2), 2, 50, 7);
  const InverseRatios b = MeasureInverseRatios(GenerateUnitSquare(3), 2, 50, 7);
  EXPECT_NEAR(a.inv1 / b.inv1, 1.0, 0.05);
  EXPECT_NEAR(a.inv2 / b.inv2, 1.0, 0.05);
  EXPECT_NEAR(a.inv3 / b.inv3, 1.0, 0.05);
  EXPECT_NEAR(a.inv4 / b.inv4, 1.0, 0.05);
}

TEST(ProjLab, ThreadCountDoesNotChangeResult)
{
  auto mesh = UnitMesh(2);
  const SmoothingConfig cfg = BuildSmoothingConfig(mesh);
  const SpaceHandle s = BuildSpace(mesh, SpaceKind::C, 1);
  SetThreadCount(1);
  const Eigen::MatrixXd one = Eigen::MatrixXd(SmoothedDofMatrix(s, cfg));
  SetThreadCount(3);
  const Eigen::MatrixXd three = Eigen::MatrixXd(SmoothedDofMatrix(s, cfg));
  SetThreadCount(1);
  EXPECT_EQ((one - three).cwiseAbs().maxCoeff(), 0.0);
}
