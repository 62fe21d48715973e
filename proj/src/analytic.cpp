// SPDX-License-Identifier: Apache-2.0

#include "ffem/analytic.hpp"

#include <stdexcept>

namespace ffem
{

Vec3 AnalyticField::Regular(SpaceKind kind, int n, double r, double z) const
{
  if (!value)
  {
    throw std::invalid_argument("analytic field has no value callback");
  }
  auto need_axis_combo = [r](const char *what)
  {
    if (r <= 0.0)
    {
      throw std::invalid_argument(std::string("missing ") + what +
                                  " combination at an axis point");
    }
  };
  switch (kind)
  {
    case SpaceKind::A:
    {
      if (combo_a)
      {
        return {combo_a(r, z), 0.0, 0.0};
      }
      need_axis_combo("n*u/r");
      return {n * value(r, z)[0] / r, 0.0, 0.0};
    }
    case SpaceKind::B:
    {
      const Vec3 u = value(r, z);
      if (combo_b)
      {
        const Vec2 c = combo_b(r, z);
        return {u[1], c[0], c[1]};
      }
      need_axis_combo("B-space");
      return {u[1], (n * u[0] + u[1]) / r, n * u[2] / r};
    }
    case SpaceKind::C:
    {
      const Vec3 u = value(r, z);
      if (combo_c)
      {
        return {u[0], combo_c(r, z), u[2]};
      }
      need_axis_combo("C-space");
      return {u[0], (n * u[1] - u[0]) / r, u[2]};
    }
    case SpaceKind::D:
      return {value(r, z)[0], 0.0, 0.0};
  }
  return {};
}

bool AnalyticField::HasCombo(SpaceKind kind) const
{
  switch (kind)
  {
    case SpaceKind::A:
      return static_cast<bool>(combo_a);
    case SpaceKind::B:
      return static_cast<bool>(combo_b);
    case SpaceKind::C:
      return static_cast<bool>(combo_c);
    case SpaceKind::D:
      return true;
  }
  return false;
}

AnalyticField ZeroField(int components)
{
  AnalyticField f;
  f.components = components;
  f.value = [](double, double) { return Vec3{0.0, 0.0, 0.0}; };
  f.partials = [](double, double) { return std::array<Vec3, 2>{}; };
  f.combo_a = [](double, double) { return 0.0; };
  f.combo_b = [](double, double) { return Vec2{0.0, 0.0}; };
  f.combo_c = [](double, double) { return 0.0; };
  return f;
}

AnalyticField ConstantScalar(double c)
{
  AnalyticField f;
  f.components = 1;
  f.value = [c](double, double) { return Vec3{c, 0.0, 0.0}; };
  f.partials = [](double, double) { return std::array<Vec3, 2>{}; };
  return f;
}

Jet operator+(const Jet &a, const Jet &b)
{
  return {a.v + b.v, a.r + b.r, a.z + b.z, a.rr + b.rr, a.rz + b.rz, a.zz + b.zz};
}
Jet operator-(const Jet &a, const Jet &b)
{
  return {a.v - b.v, a.r - b.r, a.z - b.z, a.rr - b.rr, a.rz - b.rz, a.zz - b.zz};
}
Jet operator-(const Jet &a) { return {-a.v, -a.r, -a.z, -a.rr, -a.rz, -a.zz}; }
Jet operator*(const Jet &a, const Jet &b)
{
  return {a.v * b.v,
          a.r * b.v + a.v * b.r,
          a.z * b.v + a.v * b.z,
          a.rr * b.v + 2.0 * a.r * b.r + a.v * b.rr,
          a.rz * b.v + a.r * b.z + a.z * b.r + a.v * b.rz,
          a.zz * b.v + 2.0 * a.z * b.z + a.v * b.zz};
}

namespace
{

// phi(a) given phi, phi', phi'' at a.v.
Jet Compose(const Jet &a, double f0, double f1, double f2)
{
  return {f0,
          f1 * a.r,
          f1 * a.z,
          f2 * a.r * a.r + f1 * a.rr,
          f2 * a.r * a.z + f1 * a.rz,
          f2 * a.z * a.z + f1 * a.zz};
}

}  // namespace

Jet operator/(const Jet &a, const Jet &b)
{
  const double x = b.v;
  return a * Compose(b, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}
Jet operator+(const Jet &a, double b) { return a + Jet::Constant(b); }
Jet operator+(double a, const Jet &b) { return Jet::Constant(a) + b; }
Jet operator-(const Jet &a, double b) { return a - Jet::Constant(b); }
Jet operator-(double a, const Jet &b) { return Jet::Constant(a) - b; }
Jet operator*(const Jet &a, double b) { return {a.v * b, a.r * b, a.z * b, a.rr * b, a.rz * b, a.zz * b}; }
Jet operator*(double a, const Jet &b) { return b * a; }
Jet operator/(const Jet &a, double b) { return a * (1.0 / b); }
Jet sin(const Jet &a) { return Compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
Jet cos(const Jet &a) { return Compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
Jet exp(const Jet &a)
{
  const double e = std::exp(a.v);
  return Compose(a, e, e, e);
}
Jet pow(const Jet &a, double p)
{
  const double x = a.v;
  return Compose(a, std::pow(x, p), p * std::pow(x, p - 1.0), p * (p - 1.0) * std::pow(x, p - 2.0));
}

std::array<Jet, 3> SmoothForm::Potentials(double r, double z) const
{
  const Jet R = Jet::VarR(r), Z = Jet::VarZ(z);
  std::array<Jet, 3> p;
  for (int i = 0; i < 3; i++)
  {
    if (pot[i])
    {
      p[i] = pot[i](R, Z);
    }
  }
  return p;
}

std::array<Jet, 3> SmoothForm::Physical(double r, double z) const
{
  const auto p = Potentials(r, z);
  const Jet R = Jet::VarR(r);
  const double inv_n = 1.0 / n;
  switch (kind)
  {
    case SpaceKind::A:
      return {R * p[0] * inv_n, Jet{}, Jet{}};
    case SpaceKind::B:
      return {(R * p[1] - p[0]) * inv_n, p[0], R * p[2] * inv_n};
    case SpaceKind::C:
      return {p[0], (R * p[1] + p[0]) * inv_n, p[2]};
    case SpaceKind::D:
      return {p[0], Jet{}, Jet{}};
  }
  return {};
}

AnalyticField SmoothForm::Analytic() const
{
  AnalyticField f;
  f.components = NumComponents(kind);
  const SmoothForm self = *this;
  f.value = [self](double r, double z)
  {
    const auto u = self.Physical(r, z);
    return Vec3{u[0].v, u[1].v, u[2].v};
  };
  f.partials = [self](double r, double z)
  {
    const auto u = self.Physical(r, z);
    return std::array<Vec3, 2>{Vec3{u[0].r, u[1].r, u[2].r}, Vec3{u[0].z, u[1].z, u[2].z}};
  };
  switch (kind)
  {
    case SpaceKind::A:
      f.combo_a = [self](double r, double z) { return self.Potentials(r, z)[0].v; };
      break;
    case SpaceKind::B:
      f.combo_b = [self](double r, double z)
      {
        const auto p = self.Potentials(r, z);
        return Vec2{p[1].v, p[2].v};
      };
      break;
    case SpaceKind::C:
      f.combo_c = [self](double r, double z) { return self.Potentials(r, z)[1].v; };
      break;
    case SpaceKind::D:
      break;
  }
  return f;
}

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Jet DerR(const Jet &a) { return {a.r, a.rr, a.rz, kNaN, kNaN, kNaN}; }
Jet DerZ(const Jet &a) { return {a.z, a.rz, a.zz, kNaN, kNaN, kNaN}; }

}  // namespace

SmoothForm SmoothForm::Derivative() const
{
  if (kind == SpaceKind::D)
  {
    throw std::invalid_argument("D-forms have no derivative");
  }
  SmoothForm d;
  d.kind = KindOfDegree(FormDegree(kind) + 1);
  d.n = n;
  auto eval = [self = *this](const Jet &R, const Jet &Z) { return self.Potentials(R.v, Z.v); };
  switch (kind)
  {
    case SpaceKind::A:
      d.pot[0] = [eval](const Jet &R, const Jet &Z) { return -eval(R, Z)[0]; };
      d.pot[1] = [eval](const Jet &R, const Jet &Z) { return DerR(eval(R, Z)[0]); };
      d.pot[2] = [eval](const Jet &R, const Jet &Z) { return DerZ(eval(R, Z)[0]); };
      break;
    case SpaceKind::B:
      d.pot[0] = [eval](const Jet &R, const Jet &Z)
      {
        const auto p = eval(R, Z);
        return -(p[2] + DerZ(p[0]));
      };
      d.pot[1] = [eval](const Jet &R, const Jet &Z)
      {
        const auto p = eval(R, Z);
        return DerZ(p[1]) - DerR(p[2]);
      };
      d.pot[2] = [eval](const Jet &R, const Jet &Z)
      {
        const auto p = eval(R, Z);
        return p[1] + DerR(p[0]);
      };
      break;
    case SpaceKind::C:
      d.pot[0] = [eval](const Jet &R, const Jet &Z)
      {
        const auto p = eval(R, Z);
        return DerR(p[0]) + DerZ(p[2]) - p[1];
      };
      break;
    case SpaceKind::D:
      break;
  }
  return d;
}

}  // namespace ffem
