// SPDX-License-Identifier: Apache-2.0

#include "ffem/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ffem
{

namespace
{

constexpr double kPi = std::numbers::pi;

using Partials = std::array<Vec3, 2>;

ManufacturedCase CaseK3N1()
{
  ManufacturedCase mc;
  mc.k = 3;
  mc.n = 1;
  mc.name = "default";
  mc.u.components = 1;
  mc.u.value = [](double r, double z) { return Vec3{std::sin(kPi * z) * (r * r - r), 0, 0}; };
  mc.u.partials = [](double r, double z)
  {
    return Partials{Vec3{std::sin(kPi * z) * (2 * r - 1), 0, 0},
                    Vec3{kPi * std::cos(kPi * z) * (r * r - r), 0, 0}};
  };
  mc.has_sigma = true;
  mc.sigma.components = 3;
  mc.sigma.value = [](double r, double z)
  {
    const double s = std::sin(kPi * z), c = std::cos(kPi * z);
    return Vec3{-s * (2 * r - 1), -s * (r - 1), -kPi * c * (r * r - r)};
  };
  mc.sigma.partials = [](double r, double z)
  {
    const double s = std::sin(kPi * z), c = std::cos(kPi * z);
    return Partials{Vec3{-2 * s, -s, -kPi * c * (2 * r - 1)},
                    Vec3{-kPi * c * (2 * r - 1), -kPi * c * (r - 1), kPi * kPi * s * (r * r - r)}};
  };
  mc.sigma.combo_c = [](double, double z) { return std::sin(kPi * z); };
  mc.f.components = 1;
  mc.f.value = [](double r, double z)
  {
    return Vec3{(kPi * kPi * r * r - kPi * kPi * r - 3) * std::sin(kPi * z), 0, 0};
  };
  mc.notes = "u = sin(pi z)(r^2 - r), sigma = -grad^{1*} u";
  return mc;
}

ManufacturedCase CaseK2N3()
{
  ManufacturedCase mc;
  mc.k = 2;
  mc.n = 3;
  mc.name = "default";
  mc.u.components = 3;
  mc.u.value = [](double r, double) { return Vec3{3 * r * (r - 1), -3 * r * r + 2 * r, 0}; };
  mc.u.partials = [](double r, double)
  { return Partials{Vec3{6 * r - 3, -6 * r + 2, 0}, Vec3{0, 0, 0}}; };
  mc.u.combo_c = [](double r, double) { return -12 * r + 9; };
  mc.has_sigma = true;
  mc.sigma.components = 3;
  mc.sigma.value = [](double r, double) { return Vec3{0, 0, 13 - 18 * r}; };
  mc.sigma.partials = [](double, double) { return Partials{Vec3{0, 0, -18}, Vec3{0, 0, 0}}; };
  mc.f.components = 3;
  mc.f.value = [](double r, double) { return Vec3{36 - 39 / r, -36 + 36 / r, 0}; };
  mc.notes = "u = (3r(r-1), -3r^2+2r, 0), sigma = curl^{3*} u; this u does not satisfy the "
             "natural boundary conditions of the mixed problem";
  return mc;
}

// Operator application on physical jets; results carry value and first partials.
std::array<Jet, 3> OpJet(ContinuousOp op, int n, const Jet &R, const std::array<Jet, 3> &u)
{
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto dr = [](const Jet &a) { return Jet{a.r, a.rr, a.rz, nan, nan, nan}; };
  auto dz = [](const Jet &a) { return Jet{a.z, a.rz, a.zz, nan, nan, nan}; };
  const double nn = n;
  switch (op)
  {
    case ContinuousOp::Curl:
      return {-(nn * u[2] / R + dz(u[1])), dz(u[0]) - dr(u[2]), (nn * u[0] + u[1]) / R + dr(u[1])};
    case ContinuousOp::CurlStar:
      return {nn * u[2] / R - dz(u[1]), dz(u[0]) - dr(u[2]), (-nn * u[0] + u[1]) / R + dr(u[1])};
    case ContinuousOp::Div:
      return {dr(u[0]) + (u[0] - nn * u[1]) / R + dz(u[2]), Jet{}, Jet{}};
    case ContinuousOp::GradStar:
      return {dr(u[0]), nn * u[0] / R, dz(u[0])};
    case ContinuousOp::Grad:
      return {dr(u[0]), -nn * u[0] / R, dz(u[0])};
    case ContinuousOp::DivStar:
      return {dr(u[0]) + (u[0] + nn * u[1]) / R + dz(u[2]), Jet{}, Jet{}};
  }
  return {};
}

ManufacturedCase CaseK2N3Bubble()
{
  // Regular variables u_r = r^2 b, c = r b, u_z = r^2 b with b = (1-r)^2 z^2 (1-z)^2;
  // all natural boundary conditions hold on r = 1, z = 0, z = 1.
  SmoothForm form;
  form.kind = SpaceKind::C;
  form.n = 3;
  auto bubble = [](const Jet &R, const Jet &Z)
  {
    const Jet a = 1.0 - R, b = Z * (1.0 - Z);
    return a * a * b * b;
  };
  form.pot[0] = [bubble](const Jet &R, const Jet &Z) { return R * R * bubble(R, Z); };
  form.pot[1] = [bubble](const Jet &R, const Jet &Z) { return R * bubble(R, Z); };
  form.pot[2] = [bubble](const Jet &R, const Jet &Z) { return R * R * bubble(R, Z); };
  ManufacturedCase mc;
  mc.k = 2;
  mc.n = 3;
  mc.name = "bubble";
  mc.u = form.Analytic();
  mc.has_sigma = true;
  mc.sigma.components = 3;
  mc.sigma.value = [form](double r, double z)
  {
    const auto s = OpJet(ContinuousOp::CurlStar, 3, Jet::VarR(r), form.Physical(r, z));
    return Vec3{s[0].v, s[1].v, s[2].v};
  };
  mc.sigma.partials = [form](double r, double z)
  {
    const auto s = OpJet(ContinuousOp::CurlStar, 3, Jet::VarR(r), form.Physical(r, z));
    return Partials{Vec3{s[0].r, s[1].r, s[2].r}, Vec3{s[0].z, s[1].z, s[2].z}};
  };
  mc.f.components = 3;
  mc.f.value = [form](double r, double z)
  {
    const Jet R = Jet::VarR(r);
    const auto u = form.Physical(r, z);
    const auto s = OpJet(ContinuousOp::CurlStar, 3, R, u);
    const auto cs = OpJet(ContinuousOp::Curl, 3, R, s);
    const auto du = OpJet(ContinuousOp::Div, 3, R, u);
    const auto gdu = OpJet(ContinuousOp::GradStar, 3, R, du);
    return Vec3{cs[0].v - gdu[0].v, cs[1].v - gdu[1].v, cs[2].v - gdu[2].v};
  };
  mc.notes = "boundary-consistent k=2 field built from a squared bubble";
  return mc;
}

ManufacturedCase CaseK1N2()
{
  ManufacturedCase mc;
  mc.k = 1;
  mc.n = 2;
  mc.name = "default";
  mc.u.components = 3;
  mc.u.value = [](double r, double) { return Vec3{r * r * r * (r - 1), 0, 0}; };
  mc.u.partials = [](double r, double)
  { return Partials{Vec3{4 * r * r * r - 3 * r * r, 0, 0}, Vec3{0, 0, 0}}; };
  mc.u.combo_b = [](double r, double) { return Vec2{2 * (r * r * r - r * r), 0}; };
  mc.has_sigma = true;
  mc.sigma.components = 1;
  mc.sigma.value = [](double r, double) { return Vec3{-5 * r * r * r + 4 * r * r, 0, 0}; };
  mc.sigma.partials = [](double r, double)
  { return Partials{Vec3{-15 * r * r + 8 * r, 0, 0}, Vec3{0, 0, 0}}; };
  mc.sigma.combo_a = [](double r, double) { return 2 * (-5 * r * r + 4 * r); };
  mc.f.components = 3;
  mc.f.value = [](double r, double) { return Vec3{r * (4 - 11 * r), 4 * r * (r - 1), 0}; };
  mc.f.partials = [](double r, double)
  { return Partials{Vec3{4 - 22 * r, 8 * r - 4, 0}, Vec3{0, 0, 0}}; };
  mc.f.combo_b = [](double r, double) { return Vec2{4 - 18 * r, 0}; };
  mc.notes = "u = (r^3(r-1), 0, 0), sigma = -div^{2*} u = -5r^3 + 4r^2";
  return mc;
}

ManufacturedCase CaseK0Power(double alpha, const std::string &name)
{
  ManufacturedCase mc;
  mc.k = 0;
  mc.n = 1;
  mc.name = name;
  mc.u.components = 1;
  mc.u.value = [alpha](double r, double) { return Vec3{std::pow(r, alpha), 0, 0}; };
  mc.u.partials = [alpha](double r, double)
  { return Partials{Vec3{alpha * std::pow(r, alpha - 1), 0, 0}, Vec3{0, 0, 0}}; };
  mc.u.combo_a = [alpha](double r, double) { return std::pow(r, alpha - 1); };
  mc.f.components = 1;
  mc.f.value = [alpha](double r, double)
  { return Vec3{(1 - alpha * alpha) * std::pow(r, alpha - 2), 0, 0}; };
  mc.notes = "u = r^alpha, n = 1";
  return mc;
}

ManufacturedCase CaseK0RSinZ()
{
  ManufacturedCase mc;
  mc.k = 0;
  mc.n = 1;
  mc.name = "r_sin_z";
  mc.u.components = 1;
  mc.u.value = [](double r, double z) { return Vec3{r * std::sin(z), 0, 0}; };
  mc.u.partials = [](double r, double z)
  { return Partials{Vec3{std::sin(z), 0, 0}, Vec3{r * std::cos(z), 0, 0}}; };
  mc.u.combo_a = [](double, double z) { return std::sin(z); };
  mc.f.components = 1;
  mc.f.value = [](double r, double z) { return Vec3{r * std::sin(z), 0, 0}; };
  mc.f.partials = [](double r, double z)
  { return Partials{Vec3{std::sin(z), 0, 0}, Vec3{r * std::cos(z), 0, 0}}; };
  mc.f.combo_a = [](double, double z) { return std::sin(z); };
  mc.notes = "u = r sin z, n = 1";
  return mc;
}

double RadicalInverse(int i, int base)
{
  double f = 1.0, x = 0.0;
  while (i > 0)
  {
    f /= base;
    x += f * (i % base);
    i /= base;
  }
  return x;
}

double Richardson(const std::function<double(double)> &g, double x, double h)
{
  const double d1 = (g(x + h) - g(x - h)) / (2 * h);
  const double h2 = 0.5 * h;
  const double d2 = (g(x + h2) - g(x - h2)) / (2 * h2);
  return (4 * d2 - d1) / 3;
}

double MaxAbsDiff(const Vec3 &a, const Vec3 &b)
{
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

Vec3 Scale(const Vec3 &a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

// Field whose values are an operator applied with the closed-form partials of u.
AnalyticField ExactImage(ContinuousOp op, int n, const AnalyticField &u, double sign)
{
  AnalyticField out = ApplyContinuousOperator(op, n, u);
  auto inner = out.value;
  out.value = [inner, sign](double r, double z) { return Scale(inner(r, z), sign); };
  return out;
}

}  // namespace

ManufacturedCase BuiltinCase(int k, int n, const std::string &field)
{
  if (k == 3 && n == 1 && field == "default")
    return CaseK3N1();
  if (k == 2 && n == 3 && field == "default")
    return CaseK2N3();
  if (k == 2 && n == 3 && field == "bubble")
    return CaseK2N3Bubble();
  if (k == 1 && n == 2 && field == "default")
    return CaseK1N2();
  if (k == 0 && n == 1)
  {
    if (field == "r_half")
      return CaseK0Power(0.5, field);
    if (field == "r_two_thirds")
      return CaseK0Power(2.0 / 3.0, field);
    if (field == "r_five_sixths")
      return CaseK0Power(5.0 / 6.0, field);
    if (field == "r_sin_z" || field == "default")
      return CaseK0RSinZ();
  }
  throw std::invalid_argument("unknown builtin case k=" + std::to_string(k) +
                              " n=" + std::to_string(n) + " field=" + field);
}

std::vector<std::string> BuiltinFieldNames(int k)
{
  switch (k)
  {
    case 0:
      return {"r_half", "r_two_thirds", "r_five_sixths", "r_sin_z"};
    case 2:
      return {"default", "bubble"};
    case 1:
    case 3:
      return {"default"};
  }
  return {};
}

Vec3 FdOperatorOracle(ContinuousOp op, int n, const AnalyticField &u, const Point &p, double h)
{
  if (!(p[0] > 2 * h))
  {
    throw std::invalid_argument("finite-difference oracle point too close to the axis");
  }
  if (!u.value)
  {
    throw std::invalid_argument("finite-difference oracle needs a value callback");
  }
  Vec3 dr{}, dz{};
  for (int c = 0; c < 3; c++)
  {
    dr[c] = Richardson([&](double r) { return u.value(r, p[1])[c]; }, p[0], h);
    dz[c] = Richardson([&](double z) { return u.value(p[0], z)[c]; }, p[1], h);
  }
  return ApplyOperatorPointwise(op, n, p[0], u.value(p[0], p[1]), dr, dz);
}

std::vector<Point> QuasiRandomPoints(int count, double r_min)
{
  std::vector<Point> pts;
  pts.reserve(count);
  for (int i = 1; i <= count; i++)
  {
    pts.push_back({r_min + (1.0 - r_min) * RadicalInverse(i, 2), RadicalInverse(i, 3)});
  }
  return pts;
}

ConsistencyReport CheckCaseConsistency(const ManufacturedCase &mc, int points, double r_min,
                                       double h)
{
  ConsistencyReport rep;
  const int n = mc.n;
  const auto pts = QuasiRandomPoints(points, r_min);
  auto check_partials = [&](const AnalyticField &g)
  {
    if (!g.partials)
    {
      return;
    }
    for (const auto &p : pts)
    {
      const auto d = g.partials(p[0], p[1]);
      for (int c = 0; c < 3; c++)
      {
        const double fr = Richardson([&](double r) { return g.value(r, p[1])[c]; }, p[0], h);
        const double fz = Richardson([&](double z) { return g.value(p[0], z)[c]; }, p[1], h);
        rep.partials_residual =
            std::max({rep.partials_residual, std::abs(fr - d[0][c]), std::abs(fz - d[1][c])});
      }
    }
  };
  check_partials(mc.u);
  if (mc.has_sigma)
  {
    check_partials(mc.sigma);
  }

  // sigma = delta_k u.
  if (mc.has_sigma)
  {
    static const ContinuousOp dual[] = {ContinuousOp::DivStar, ContinuousOp::DivStar,
                                        ContinuousOp::CurlStar, ContinuousOp::GradStar};
    static const double sign[] = {0.0, -1.0, 1.0, -1.0};
    for (const auto &p : pts)
    {
      const Vec3 s = Scale(FdOperatorOracle(dual[mc.k], n, mc.u, p, h), sign[mc.k]);
      rep.sigma_residual = std::max(rep.sigma_residual, MaxAbsDiff(s, mc.sigma.value(p[0], p[1])));
    }
  }

  // f = d^{k-1} sigma + delta_{k+1} d^k u.
  for (const auto &p : pts)
  {
    Vec3 total{};
    if (mc.k >= 1)
    {
      static const ContinuousOp d_of[] = {ContinuousOp::Grad, ContinuousOp::Grad,
                                          ContinuousOp::Curl, ContinuousOp::Div};
      total = FdOperatorOracle(d_of[mc.k], n, mc.sigma, p, h);
    }
    if (mc.k <= 2)
    {
      static const ContinuousOp d_ops[] = {ContinuousOp::Grad, ContinuousOp::Curl,
                                           ContinuousOp::Div};
      static const ContinuousOp dual_next[] = {ContinuousOp::DivStar, ContinuousOp::CurlStar,
                                               ContinuousOp::GradStar};
      static const double sign_next[] = {-1.0, 1.0, -1.0};
      const AnalyticField du = ExactImage(d_ops[mc.k], n, mc.u, 1.0);
      const Vec3 t = Scale(FdOperatorOracle(dual_next[mc.k], n, du, p, h), sign_next[mc.k]);
      for (int c = 0; c < 3; c++)
      {
        total[c] += t[c];
      }
    }
    rep.f_residual = std::max(rep.f_residual, MaxAbsDiff(total, mc.f.value(p[0], p[1])));
  }
  return rep;
}

AnalyticField SweepRhs()
{
  AnalyticField f;
  f.components = 3;
  f.value = [](double r, double) { return Vec3{0, r, 0}; };
  f.partials = [](double, double) { return Partials{Vec3{0, 1, 0}, Vec3{0, 0, 0}}; };
  return f;
}

}  // namespace ffem
