// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_POLY_HPP
#define FFEM_POLY_HPP

#include <array>
#include <cmath>
#include <stdexcept>

namespace ffem
{

// Dense bivariate polynomial in (r, z) with coefficient c(i, j) of r^i z^j.
class Poly
{
public:
  static constexpr int kMaxDeg = 7;

  Poly() { c_.fill(0.0); }

  static Poly Constant(double a)
  {
    Poly p;
    p.coef(0, 0) = a;
    return p;
  }
  static Poly Affine(double a0, double ar, double az)
  {
    Poly p;
    p.coef(0, 0) = a0;
    p.coef(1, 0) = ar;
    p.coef(0, 1) = az;
    return p;
  }
  static Poly R() { return Affine(0.0, 1.0, 0.0); }
  static Poly Z() { return Affine(0.0, 0.0, 1.0); }

  double &coef(int i, int j) { return c_[i * (kMaxDeg + 1) + j]; }
  double coef(int i, int j) const { return c_[i * (kMaxDeg + 1) + j]; }

  int Degree() const
  {
    int d = -1;
    for (int i = 0; i <= kMaxDeg; i++)
    {
      for (int j = 0; i + j <= kMaxDeg; j++)
      {
        if (coef(i, j) != 0.0 && i + j > d)
        {
          d = i + j;
        }
      }
    }
    return d;
  }

  double operator()(double r, double z) const
  {
    std::array<double, kMaxDeg + 1> zp;
    zp[0] = 1.0;
    for (int j = 1; j <= kMaxDeg; j++)
    {
      zp[j] = zp[j - 1] * z;
    }
    double result = 0.0, rp = 1.0;
    for (int i = 0; i <= kMaxDeg; i++)
    {
      double row = 0.0;
      for (int j = 0; i + j <= kMaxDeg; j++)
      {
        row += coef(i, j) * zp[j];
      }
      result += rp * row;
      rp *= r;
    }
    return result;
  }

  Poly &operator+=(const Poly &o)
  {
    for (std::size_t k = 0; k < c_.size(); k++)
    {
      c_[k] += o.c_[k];
    }
    return *this;
  }
  Poly &operator-=(const Poly &o)
  {
    for (std::size_t k = 0; k < c_.size(); k++)
    {
      c_[k] -= o.c_[k];
    }
    return *this;
  }
  Poly &operator*=(double a)
  {
    for (auto &v : c_)
    {
      v *= a;
    }
    return *this;
  }

  friend Poly operator+(Poly a, const Poly &b) { return a += b; }
  friend Poly operator-(Poly a, const Poly &b) { return a -= b; }
  friend Poly operator-(Poly a)
  {
    a *= -1.0;
    return a;
  }
  friend Poly operator*(Poly a, double s) { return a *= s; }
  friend Poly operator*(double s, Poly a) { return a *= s; }

  friend Poly operator*(const Poly &a, const Poly &b)
  {
    Poly p;
    for (int i = 0; i <= kMaxDeg; i++)
    {
      for (int j = 0; i + j <= kMaxDeg; j++)
      {
        const double ca = a.coef(i, j);
        if (ca == 0.0)
        {
          continue;
        }
        for (int k = 0; k <= kMaxDeg; k++)
        {
          for (int l = 0; k + l <= kMaxDeg; l++)
          {
            const double cb = b.coef(k, l);
            if (cb == 0.0)
            {
              continue;
            }
            if (i + j + k + l > kMaxDeg)
            {
              throw std::overflow_error("Poly product exceeds maximum degree");
            }
            p.coef(i + k, j + l) += ca * cb;
          }
        }
      }
    }
    return p;
  }

  Poly Dr() const
  {
    Poly p;
    for (int i = 1; i <= kMaxDeg; i++)
    {
      for (int j = 0; i + j <= kMaxDeg; j++)
      {
        p.coef(i - 1, j) = i * coef(i, j);
      }
    }
    return p;
  }

  Poly Dz() const
  {
    Poly p;
    for (int i = 0; i <= kMaxDeg; i++)
    {
      for (int j = 1; i + j <= kMaxDeg; j++)
      {
        p.coef(i, j - 1) = j * coef(i, j);
      }
    }
    return p;
  }

  Poly TimesR() const
  {
    Poly p;
    for (int i = 0; i < kMaxDeg; i++)
    {
      for (int j = 0; i + j < kMaxDeg; j++)
      {
        p.coef(i + 1, j) = coef(i, j);
      }
    }
    for (int j = 0; j <= kMaxDeg; j++)
    {
      if (coef(kMaxDeg - j, j) != 0.0)
      {
        throw std::overflow_error("Poly::TimesR exceeds maximum degree");
      }
    }
    return p;
  }

  // Exact division by r; the r^0 column must vanish up to tol relative to the largest
  // coefficient.
  Poly DivideByR(double tol = 1e-12) const
  {
    double scale = 0.0;
    for (double v : c_)
    {
      scale = std::max(scale, std::abs(v));
    }
    Poly p;
    for (int j = 0; j <= kMaxDeg; j++)
    {
      if (std::abs(coef(0, j)) > tol * std::max(scale, 1.0))
      {
        throw std::domain_error("Poly::DivideByR on a polynomial not divisible by r");
      }
    }
    for (int i = 1; i <= kMaxDeg; i++)
    {
      for (int j = 0; i + j <= kMaxDeg; j++)
      {
        p.coef(i - 1, j) = coef(i, j);
      }
    }
    return p;
  }

  double MaxAbsCoef() const
  {
    double m = 0.0;
    for (double v : c_)
    {
      m = std::max(m, std::abs(v));
    }
    return m;
  }

private:
  std::array<double, (kMaxDeg + 1) * (kMaxDeg + 1)> c_;
};

// Three polynomial components; scalar quantities use entry 0 only.
using PolyVec = std::array<Poly, 3>;

}  // namespace ffem

#endif  // FFEM_POLY_HPP
