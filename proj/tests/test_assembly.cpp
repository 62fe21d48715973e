// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "ffem/assembly.hpp"
#include "ffem/mms.hpp"

using namespace ffem;

namespace
{
std::shared_ptr<const Mesh> UnitMesh(int level)
{
  return std::make_shared<const Mesh>(GenerateUnitSquare(level));
}

double MaxAbs(const SparseMatrix &m)
{
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); k++)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

Jet Bump(const Jet &r, const Jet &z) { return pow((1.0 - r) * z * (1.0 - z), 2.0); }
}  // namespace

TEST(Assembly, ScalarMassOnReferenceTriangle)
{
  auto mesh = std::make_shared<const Mesh>(
      BuildMesh({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {{0, 1, 2}}));
  const SpaceHandle d = BuildSpace(mesh, SpaceKind::D, 1);
  const double phi = EvalBasis(d, 0, {0.2, 0.2}).phys[0][0];
  const SparseMatrix m = MassMatrix(d).mat;
  EXPECT_NEAR(m.coeff(0, 0), phi * phi / 6.0, 1e-15);
}

TEST(Assembly, MassMatricesSymmetricPositive)
{
  auto mesh = UnitMesh(2);
  for (int k = 0; k <= 3; k++)
  {
    const SpaceHandle s = BuildSpace(mesh, KindOfDegree(k), 2);
    const Eigen::MatrixXd m = Eigen::MatrixXd(MassMatrix(s).mat);
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-15 * m.cwiseAbs().maxCoeff() + 1e-18);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << "k=" << k;
  }
}

TEST(Assembly, DerivativeComposesToZero)
{
  auto mesh = UnitMesh(3);
  for (int n : {1, 2, 5})
  {
    const SpaceHandle a = BuildSpace(mesh, SpaceKind::A, n);
    const SpaceHandle b = NextSpace(a), c = NextSpace(b);
    const SparseMatrix cg = DerivativeMatrix(b).mat * DerivativeMatrix(a).mat;
    const SparseMatrix dc = DerivativeMatrix(c).mat * DerivativeMatrix(b).mat;
    EXPECT_LT(MaxAbs(cg), 1e-12);
    EXPECT_LT(MaxAbs(dc), 1e-12);
  }
}

TEST(Assembly, DerivativeMatrixIsIntegral)
{
  auto mesh = UnitMesh(2);
  const SparseMatrix g = DerivativeMatrix(BuildSpace(mesh, SpaceKind::A, 3)).mat;
  for (int k = 0; k < g.outerSize(); k++)
    for (SparseMatrix::InnerIterator it(g, k); it; ++it)
      EXPECT_NEAR(it.value(), std::round(it.value()), 1e-12);
}

TEST(Assembly, LoadOfOneIsWeightedIntegral)
{
  auto mesh = UnitMesh(2);
  const SpaceHandle d = BuildSpace(mesh, SpaceKind::D, 1);
  const Eigen::VectorXd f = LoadVector(d, ConstantScalar(1.0));
  for (int t = 0; t < mesh->NumTriangles(); t++)
  {
    const double phi = EvalBasis(d, t, mesh->Centroid(t)).phys[0][0];
    EXPECT_NEAR(f[t], phi * mesh->Area(t) * mesh->Centroid(t)[0], 1e-14);
  }
  const Eigen::VectorXd f20 = LoadVector(d, ConstantScalar(1.0), 20);
  EXPECT_LT((f - f20).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assembly, LoadMatchesMassForDiscreteField)
{
  auto mesh = UnitMesh(2);
  const SpaceHandle c = BuildSpace(mesh, SpaceKind::C, 2);
  Eigen::VectorXd x(c.DofCount());
  for (int i = 0; i < x.size(); i++)
    x[i] = std::sin(0.7 * i + 0.1);
  const Field field(c, x);
  AnalyticField f;
  f.components = 3;
  auto loc = std::make_shared<TriangleLocator>(*mesh);
  f.value = [field, loc](double r, double z)
  {
    const int t = loc->Locate({r, z});
    return EvalField(field, t, {r, z}).phys;
  };
  const Eigen::VectorXd lhs = MassMatrix(c).mat * x;
  const Eigen::VectorXd rhs = LoadVector(c, f, 6);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Assembly, DivergencePointwise)
{
  const double r = 0.5;
  const Vec3 u{r * r * r * (r - 1.0), 0.0, 0.0};
  const Vec3 ur{4 * r * r * r - 3 * r * r, 0.0, 0.0};
  const Vec3 uz{0.0, 0.0, 0.0};
  const Vec3 d = ApplyOperatorPointwise(ContinuousOp::Div, 2, r, u, ur, uz);
  EXPECT_NEAR(d[0], 5 * r * r * r - 4 * r * r, 1e-15);
  EXPECT_NEAR(d[0], -0.375, 1e-15);
}

TEST(Assembly, CurlOfGradientVanishes)
{
  SmoothForm s;
  s.kind = SpaceKind::A;
  s.n = 3;
  s.pot[0] = [](const Jet &r, const Jet &z) { return r * sin(z) + r * r * z; };
  const AnalyticField g = ApplyContinuousOperator(ContinuousOp::Grad, 3, s.Analytic());
  for (const Point &p : QuasiRandomPoints(20, 0.2))
  {
    const Vec3 c = FdOperatorOracle(ContinuousOp::Curl, 3, g, p);
    for (double v : c)
      EXPECT_NEAR(v, 0.0, 1e-7);
  }
}

TEST(Assembly, OperatorNamesRoundTrip)
{
  for (ContinuousOp op : {ContinuousOp::Grad, ContinuousOp::Curl, ContinuousOp::Div,
                          ContinuousOp::GradStar, ContinuousOp::CurlStar, ContinuousOp::DivStar})
  {
    EXPECT_EQ(ParseContinuousOp(ContinuousOpName(op)), op);
  }
  EXPECT_THROW(ParseContinuousOp("laplace"), std::exception);
}

TEST(Assembly, AdjointIdentity)
{
  const Mesh mesh = GenerateUnitSquare(3);
  SmoothForm u;
  u.kind = SpaceKind::A;
  u.n = 2;
  u.pot[0] = [](const Jet &r, const Jet &z) { return r * z + 1.0; };
  SmoothForm v;
  v.kind = SpaceKind::B;
  v.n = 2;
  v.pot = {Bump, [](const Jet &r, const Jet &z) { return Bump(r, z) * (1.0 + r); },
           [](const Jet &r, const Jet &z) { return Bump(r, z) * z; }};
  EXPECT_LT(AdjointCheck(0, 2, mesh, u.Analytic(), v.Analytic()), 1e-8);
  EXPECT_LT(AdjointCheck(0, 2, mesh, ZeroField(1), v.Analytic()), 1e-15);

  SmoothForm w = v;
  w.pot = {[](const Jet &r, const Jet &z) { return 1.0 + r * z; },
           [](const Jet &r, const Jet &) { return 1.0 + r; },
           [](const Jet &, const Jet &z) { return 1.0 + z; }};
  EXPECT_GT(AdjointCheck(0, 2, mesh, u.Analytic(), w.Analytic()), 1e-4);
}

TEST(Assembly, WriteMatrixHeader)
{
  auto mesh = UnitMesh(1);
  const SparseMatrix m = MassMatrix(BuildSpace(mesh, SpaceKind::D, 1)).mat;
  std::ostringstream os;
  WriteMatrix(os, m);
  std::istringstream is(os.str());
  std::string first;
  std::getline(is, first);
  EXPECT_EQ(first, "%8 8 8");
}
