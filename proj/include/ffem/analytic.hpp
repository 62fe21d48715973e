// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_ANALYTIC_HPP
#define FFEM_ANALYTIC_HPP

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "ffem/femspace.hpp"

namespace ffem
{

// Callback bundle for a smooth scalar or 3-component field in (r, z).
struct AnalyticField
{
  int components = 1;
  std::function<Vec3(double, double)> value;
  // Optional: {d/dr, d/dz} of each component.
  std::function<std::array<Vec3, 2>(double, double)> partials;
  // Optional regularized combinations (see femspace.hpp).
  std::function<double(double, double)> combo_a;  // n u / r
  std::function<Vec2(double, double)> combo_b;    // ((n u_r + u_theta)/r, n u_z/r)
  std::function<double(double, double)> combo_c;  // (n u_theta - u_r)/r

  // Regular variables for the given space; combos are preferred, quotients are used
  // off the axis when a combo is absent.
  Vec3 Regular(SpaceKind kind, int n, double r, double z) const;
  bool HasCombo(SpaceKind kind) const;
};

AnalyticField ZeroField(int components);
AnalyticField ConstantScalar(double c);

// Second-order forward jet in two variables.
struct Jet
{
  double v = 0.0, r = 0.0, z = 0.0, rr = 0.0, rz = 0.0, zz = 0.0;

  static Jet Constant(double c) { return {c, 0, 0, 0, 0, 0}; }
  static Jet VarR(double r) { return {r, 1, 0, 0, 0, 0}; }
  static Jet VarZ(double z) { return {z, 0, 1, 0, 0, 0}; }
};

Jet operator+(const Jet &a, const Jet &b);
Jet operator-(const Jet &a, const Jet &b);
Jet operator-(const Jet &a);
Jet operator*(const Jet &a, const Jet &b);
Jet operator/(const Jet &a, const Jet &b);
Jet operator+(const Jet &a, double b);
Jet operator+(double a, const Jet &b);
Jet operator-(const Jet &a, double b);
Jet operator-(double a, const Jet &b);
Jet operator*(const Jet &a, double b);
Jet operator*(double a, const Jet &b);
Jet operator/(const Jet &a, double b);
Jet sin(const Jet &a);
Jet cos(const Jet &a);
Jet exp(const Jet &a);
Jet pow(const Jet &a, double p);

using JetFn = std::function<Jet(const Jet &, const Jet &)>;

// Smooth k-form given by its regular variables (see femspace.hpp) as jet functions.
// Derivative() produces the image under d; its potentials carry value and first
// partials only.
struct SmoothForm
{
  SpaceKind kind = SpaceKind::A;
  int n = 1;
  std::array<JetFn, 3> pot;

  std::array<Jet, 3> Potentials(double r, double z) const;
  std::array<Jet, 3> Physical(double r, double z) const;
  AnalyticField Analytic() const;
  SmoothForm Derivative() const;
};

}  // namespace ffem

#endif  // FFEM_ANALYTIC_HPP
