// SPDX-License-Identifier: Apache-2.0

#include "ffem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ffem
{

void GaussLegendre01(int n, std::vector<double> &x, std::vector<double> &w)
{
  if (n < 1)
  {
    throw std::invalid_argument("Gauss-Legendre point count must be positive");
  }
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; i++)
  {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; it++)
    {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; k++)
      {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? t : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (t * pn - pm) / (t * t - 1.0);
      const double dt = pn / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16)
      {
        break;
      }
    }
    {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; k++)
      {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? t : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (t * pn - pm) / (t * t - 1.0);
    }
    x[n - 1 - i] = 0.5 * (1.0 + t);
    w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

namespace
{

std::mutex cache_mutex;

QuadRule BuildTriangleRule(int degree)
{
  // Collapsed product: x = u, y = (1 - u) v with Jacobian (1 - u).
  const int n = degree / 2 + 1;
  std::vector<double> x, w;
  GaussLegendre01(n + 1, x, w);
  std::vector<double> xv, wv;
  GaussLegendre01(n, xv, wv);
  QuadRule rule;
  rule.exact_degree = degree;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    for (std::size_t j = 0; j < xv.size(); j++)
    {
      rule.points.push_back({x[i], (1.0 - x[i]) * xv[j]});
      rule.weights.push_back(w[i] * wv[j] * (1.0 - x[i]));
    }
  }
  return rule;
}

QuadRule BuildEdgeRule(int degree)
{
  const int n = degree / 2 + 1;
  std::vector<double> x, w;
  GaussLegendre01(n, x, w);
  QuadRule rule;
  rule.exact_degree = 2 * n - 1;
  for (int i = 0; i < n; i++)
  {
    rule.points.push_back({x[i], 0.0});
    rule.weights.push_back(w[i]);
  }
  return rule;
}

}  // namespace

const QuadRule &TriangleRule(int degree)
{
  if (degree < 1 || degree > 20)
  {
    throw std::invalid_argument("triangle rule degree must lie in 1..20");
  }
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(degree);
  if (it == cache.end())
  {
    it = cache.emplace(degree, BuildTriangleRule(degree)).first;
  }
  return it->second;
}

const QuadRule &EdgeRule(int degree)
{
  if (degree < 1 || degree > 40)
  {
    throw std::invalid_argument("edge rule degree must lie in 1..40");
  }
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(degree);
  if (it == cache.end())
  {
    it = cache.emplace(degree, BuildEdgeRule(degree)).first;
  }
  return it->second;
}

QuadRule DiskRule(int radial_points, int angular_points, bool half, Point center,
                  double radius)
{
  if (radial_points < 1 || angular_points < 1 || !(radius > 0.0))
  {
    throw std::invalid_argument("disk rule needs positive point counts and radius");
  }
  std::vector<double> xr, wr;
  GaussLegendre01(radial_points, xr, wr);
  std::vector<double> phi, wphi;
  if (half)
  {
    GaussLegendre01(angular_points, phi, wphi);
    for (int j = 0; j < angular_points; j++)
    {
      phi[j] = std::numbers::pi * (phi[j] - 0.5);
      wphi[j] *= std::numbers::pi;
    }
  }
  else
  {
    phi.resize(angular_points);
    wphi.assign(angular_points, 2.0 * std::numbers::pi / angular_points);
    for (int j = 0; j < angular_points; j++)
    {
      phi[j] = 2.0 * std::numbers::pi * (j + 0.5) / angular_points;
    }
  }
  QuadRule rule;
  rule.exact_degree = half ? std::min(2 * radial_points - 2, angular_points - 1)
                           : std::min(2 * radial_points - 2, angular_points - 1);
  for (int i = 0; i < radial_points; i++)
  {
    const double rho = xr[i] * radius;
    for (int j = 0; j < angular_points; j++)
    {
      rule.points.push_back(
          {center[0] + rho * std::cos(phi[j]), center[1] + rho * std::sin(phi[j])});
      rule.weights.push_back(wr[i] * radius * rho * wphi[j]);
    }
  }
  return rule;
}

QuadRule MapToTriangle(const QuadRule &ref, const Point &a, const Point &b, const Point &c)
{
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
  QuadRule rule;
  rule.exact_degree = ref.exact_degree;
  rule.points.resize(ref.Size());
  rule.weights.resize(ref.Size());
  for (int q = 0; q < ref.Size(); q++)
  {
    const double s = ref.points[q][0], t = ref.points[q][1];
    rule.points[q] = {a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
                      a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1])};
    rule.weights[q] = ref.weights[q] * std::abs(det);
  }
  return rule;
}

}  // namespace ffem
