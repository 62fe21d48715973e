// SPDX-License-Identifier: Apache-2.0

#include "ffem/projlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "ffem/parallel.hpp"
#include "ffem/quadrature.hpp"

namespace ffem
{

namespace
{

using Monomials = std::vector<std::array<int, 2>>;

Monomials MonomialList(int degree)
{
  Monomials m;
  for (int d = 0; d <= degree; d++)
  {
    for (int j = 0; j <= d; j++)
    {
      m.push_back({d - j, j});
    }
  }
  return m;
}

double MonomialValue(const std::array<int, 2> &e, double x, double y)
{
  return std::pow(x, e[0]) * std::pow(y, e[1]);
}

int DefaultRadial(int l) { return (3 + 2 * l + 3) / 2; }
int DefaultAngular(int l) { return 3 + 2 * l + 1; }
int DefaultHalfAngular(int l) { return 2 * (3 + 2 * l + 1) + 4; }

// ---------------------------------------------------------------------------------------
// Planar geometry

struct Poly2
{
  std::array<Point, 16> p;
  int size = 0;
  void Push(const Point &q) { p[size++] = q; }
};

double Cross(const Point &a, const Point &b, const Point &c)
{
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

double SignedArea(const Poly2 &poly)
{
  double s = 0.0;
  for (int i = 0; i < poly.size; i++)
  {
    const Point &a = poly.p[i];
    const Point &b = poly.p[(i + 1) % poly.size];
    s += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * s;
}

// Keep the part where f(p) = nx p_r + nz p_z - c <= 0.
Poly2 ClipHalfPlane(const Poly2 &in, double nx, double nz, double c)
{
  Poly2 out;
  if (in.size == 0)
  {
    return out;
  }
  for (int i = 0; i < in.size; i++)
  {
    const Point &a = in.p[i];
    const Point &b = in.p[(i + 1) % in.size];
    const double fa = nx * a[0] + nz * a[1] - c;
    const double fb = nx * b[0] + nz * b[1] - c;
    if (fa <= 0.0)
    {
      out.Push(a);
    }
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
    {
      const double s = fa / (fa - fb);
      out.Push({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
    }
  }
  return out;
}

// Intersection with a counterclockwise triangle.
Poly2 ClipTriangle(const Poly2 &in, const Point &a, const Point &b, const Point &c)
{
  Poly2 cur = in;
  const Point v[3] = {a, b, c};
  for (int i = 0; i < 3 && cur.size > 0; i++)
  {
    const Point &p = v[i];
    const Point &q = v[(i + 1) % 3];
    // Inside: cross(q - p, x - p) >= 0, i.e. -(q_z - p_z) x_r + (q_r - p_r) x_z <= ...
    const double nx = q[1] - p[1], nz = -(q[0] - p[0]);
    cur = ClipHalfPlane(cur, nx, nz, nx * p[0] + nz * p[1]);
  }
  return cur;
}

// Rectangular domain [0, R] x [Z0, Z1] and the reflections used to extend discrete fields.
struct DomainBox
{
  double r_max = 1.0, z_min = 0.0, z_max = 1.0;

  // Region code: bit 0 for r > R, bit 1 for z < Z0, bit 2 for z > Z1.
  int Region(const Point &p) const
  {
    int g = 0;
    if (p[0] > r_max)
      g |= 1;
    if (p[1] < z_min)
      g |= 2;
    else if (p[1] > z_max)
      g |= 4;
    return g;
  }
  Point Map(const Point &p, int g) const
  {
    Point q = p;
    if (g & 1)
      q[0] = 2 * r_max - q[0];
    if (g & 2)
      q[1] = 2 * z_min - q[1];
    if (g & 4)
      q[1] = 2 * z_max - q[1];
    return q;
  }
};

DomainBox BoxOf(const Mesh &mesh)
{
  DomainBox box;
  box.r_max = -1e300;
  box.z_min = 1e300;
  box.z_max = -1e300;
  for (const Point &p : mesh.vertices)
  {
    box.r_max = std::max(box.r_max, p[0]);
    box.z_min = std::min(box.z_min, p[1]);
    box.z_max = std::max(box.z_max, p[1]);
  }
  return box;
}

// Split a convex polygon along the box lines it crosses.
void SplitByBox(const Poly2 &poly, const DomainBox &box, std::vector<Poly2> &pieces)
{
  pieces.clear();
  pieces.push_back(poly);
  auto split = [&](double nx, double nz, double c)
  {
    std::vector<Poly2> next;
    for (const Poly2 &p : pieces)
    {
      double fmin = 1e300, fmax = -1e300;
      for (int i = 0; i < p.size; i++)
      {
        const double f = nx * p.p[i][0] + nz * p.p[i][1] - c;
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
      }
      if (fmin >= 0.0 || fmax <= 0.0)
      {
        next.push_back(p);
        continue;
      }
      Poly2 lo = ClipHalfPlane(p, nx, nz, c);
      Poly2 hi = ClipHalfPlane(p, -nx, -nz, -c);
      if (lo.size >= 3)
        next.push_back(lo);
      if (hi.size >= 3)
        next.push_back(hi);
    }
    pieces.swap(next);
  };
  split(1.0, 0.0, box.r_max);
  split(0.0, 1.0, box.z_min);
  split(0.0, 1.0, box.z_max);
}

Point Centroid(const Poly2 &p)
{
  Point c{0.0, 0.0};
  for (int i = 0; i < p.size; i++)
  {
    c[0] += p.p[i][0];
    c[1] += p.p[i][1];
  }
  return {c[0] / p.size, c[1] / p.size};
}

// ---------------------------------------------------------------------------------------
// Discrete fields: one accumulator row per smoothed DOF.

enum class FormType
{
  Zero,
  One,
  Two
};

struct RowAccumulator
{
  std::vector<double> val;
  std::vector<int> touched;
  std::vector<char> mark;

  explicit RowAccumulator(int n) : val(n, 0.0), mark(n, 0) {}
  void Add(int i, double v)
  {
    if (!mark[i])
    {
      mark[i] = 1;
      touched.push_back(i);
    }
    val[i] += v;
  }
  void Flush(int row, std::vector<Eigen::Triplet<double>> &trip)
  {
    std::sort(touched.begin(), touched.end());
    for (int i : touched)
    {
      if (val[i] != 0.0)
      {
        trip.emplace_back(row, i, val[i]);
      }
      val[i] = 0.0;
      mark[i] = 0;
    }
    touched.clear();
  }
};

// Regular-variable component(s) carrying each form type.
struct FormComponents
{
  int zero = 0;
  int two = 0;
  std::array<int, 2> one = {1, 2};
  std::array<double, 2> one_sign = {1.0, 1.0};
};

FormComponents ComponentsOf(SpaceKind kind)
{
  FormComponents f;
  switch (kind)
  {
    case SpaceKind::A:
      f.zero = 0;
      break;
    case SpaceKind::B:
      f.zero = 0;
      f.one = {1, 2};
      break;
    case SpaceKind::C:
      f.one = {2, 0};
      f.one_sign = {1.0, -1.0};
      f.two = 1;
      break;
    case SpaceKind::D:
      f.two = 0;
      break;
  }
  return f;
}

class DiscreteSampler
{
public:
  DiscreteSampler(const SpaceHandle &space)
      : space_(space), mesh_(space.GetMesh()), locator_(mesh_), box_(BoxOf(mesh_)),
        comps_(ComponentsOf(space.Kind()))
  {
    const int nt = mesh_.NumTriangles();
    basis_.reserve(nt);
    idx_.resize(nt);
    sgn_.resize(nt);
    two_.resize(nt);
    two_nz_.resize(nt);
    tri_box_.resize(nt);
    for (int t = 0; t < nt; t++)
    {
      basis_.push_back(BuildLocalBasis(space_, t));
      space_.LocalDofs(t, idx_[t], sgn_[t]);
      const BasisValues bv = EvalBasis(basis_[t], mesh_.Centroid(t));
      two_nz_[t] = 0;
      for (int i = 0; i < basis_[t].size; i++)
      {
        two_[t][i] = bv.reg[i][comps_.two];
        two_nz_[t] += two_[t][i] != 0.0;
      }
      std::array<double, 4> bb = {1e300, 1e300, -1e300, -1e300};
      for (int i = 0; i < 3; i++)
      {
        const Point v = mesh_.Vertex(t, i);
        bb = {std::min(bb[0], v[0]), std::min(bb[1], v[1]), std::max(bb[2], v[0]),
              std::max(bb[3], v[1])};
      }
      tri_box_[t] = bb;
    }
  }

  const DomainBox &Box() const { return box_; }
  const TriangleLocator &Locator() const { return locator_; }

  int LocateChecked(const Point &p) const
  {
    int t = locator_.Locate(p, 1e-12);
    if (t < 0)
    {
      t = locator_.Locate(p, 1e-9);
    }
    if (t < 0)
    {
      std::ostringstream os;
      os << "smoothing sample (" << p[0] << ", " << p[1]
         << ") lies outside the reflected domain; the extension needs a rectangular mesh";
      throw std::runtime_error(os.str());
    }
    return t;
  }

  void AddZero(RowAccumulator &acc, const Point &y, double weight) const
  {
    const Point p = box_.Map(y, box_.Region(y));
    const int t = LocateChecked(p);
    const BasisValues bv = EvalBasis(basis_[t], p);
    for (int i = 0; i < basis_[t].size; i++)
    {
      const double v = bv.reg[i][comps_.zero];
      if (v != 0.0)
      {
        acc.Add(idx_[t][i], weight * sgn_[t][i] * v);
      }
    }
  }

  void AddOne(RowAccumulator &acc, const Point &y0, const Point &y1, double weight,
              std::vector<int> &cand) const
  {
    // Split at the box lines.
    std::vector<double> cut = {0.0, 1.0};
    const double dr = y1[0] - y0[0], dz = y1[1] - y0[1];
    auto add_cut = [&](double v0, double dv, double c)
    {
      if (dv != 0.0)
      {
        const double s = (c - v0) / dv;
        if (s > 0.0 && s < 1.0)
          cut.push_back(s);
      }
    };
    add_cut(y0[0], dr, box_.r_max);
    add_cut(y0[1], dz, box_.z_min);
    add_cut(y0[1], dz, box_.z_max);
    std::sort(cut.begin(), cut.end());
    for (size_t k = 0; k + 1 < cut.size(); k++)
    {
      const double sa = cut[k], sb = cut[k + 1];
      if (sb - sa <= 1e-15)
        continue;
      const Point pa = {y0[0] + sa * dr, y0[1] + sa * dz};
      const Point pb = {y0[0] + sb * dr, y0[1] + sb * dz};
      const Point mid = {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
      const int g = box_.Region(mid);
      AddSegmentInside(acc, box_.Map(pa, g), box_.Map(pb, g), weight, cand);
    }
  }

  // Candidate triangles for every reflection region touched by the box [lo, hi].
  void PrepareRegions(const Point &lo, const Point &hi,
                      std::array<std::vector<int>, 8> &cand) const
  {
    for (int g = 0; g < 8; g++)
    {
      cand[g].clear();
      if (((g & 1) && hi[0] <= box_.r_max) || ((g & 2) && lo[1] >= box_.z_min) ||
          ((g & 4) && hi[1] <= box_.z_max) || ((g & 6) == 6))
        continue;
      const Point a = box_.Map(lo, g), b = box_.Map(hi, g);
      locator_.Candidates({std::min(a[0], b[0]), std::min(a[1], b[1])},
                          {std::max(a[0], b[0]), std::max(a[1], b[1])}, cand[g]);
      std::erase_if(cand[g], [&](int t) { return two_nz_[t] == 0; });
    }
  }

  void AddTwo(RowAccumulator &acc, const Poly2 &poly, double weight,
              std::vector<Poly2> &pieces, const std::array<std::vector<int>, 8> &cand) const
  {
    SplitByBox(poly, box_, pieces);
    for (const Poly2 &piece : pieces)
    {
      const int g = box_.Region(Centroid(piece));
      Poly2 mapped;
      double lo0 = 1e300, lo1 = 1e300, hi0 = -1e300, hi1 = -1e300;
      for (int i = 0; i < piece.size; i++)
      {
        const Point q = box_.Map(piece.p[i], g);
        mapped.Push(q);
        lo0 = std::min(lo0, q[0]);
        hi0 = std::max(hi0, q[0]);
        lo1 = std::min(lo1, q[1]);
        hi1 = std::max(hi1, q[1]);
      }
      for (int t : cand[g])
      {
        const auto &bb = tri_box_[t];
        if (bb[0] >= hi0 || bb[2] <= lo0 || bb[1] >= hi1 || bb[3] <= lo1)
          continue;
        const Poly2 c = ClipTriangle(mapped, mesh_.Vertex(t, 0), mesh_.Vertex(t, 1),
                                     mesh_.Vertex(t, 2));
        if (c.size < 3)
          continue;
        const double area = SignedArea(c);
        if (area == 0.0)
          continue;
        for (int i = 0; i < basis_[t].size; i++)
        {
          const double v = two_[t][i];
          if (v != 0.0)
          {
            acc.Add(idx_[t][i], weight * area * sgn_[t][i] * v);
          }
        }
      }
    }
  }

private:
  void AddSegmentInside(RowAccumulator &acc, const Point &a, const Point &b, double weight,
                        std::vector<int> &cand) const
  {
    const double dr = b[0] - a[0], dz = b[1] - a[1];
    locator_.Candidates({std::min(a[0], b[0]), std::min(a[1], b[1])},
                        {std::max(a[0], b[0]), std::max(a[1], b[1])}, cand);
    std::vector<double> cut = {0.0, 1.0};
    for (int t : cand)
    {
      for (int i = 0; i < 3; i++)
      {
        const Point e0 = mesh_.Vertex(t, (i + 1) % 3);
        const Point e1 = mesh_.Vertex(t, (i + 2) % 3);
        const double fr = e1[0] - e0[0], fz = e1[1] - e0[1];
        const double den = dr * fz - dz * fr;
        if (std::abs(den) < 1e-300)
          continue;
        const double wr = e0[0] - a[0], wz = e0[1] - a[1];
        const double s = (wr * fz - wz * fr) / den;
        const double u = (wr * dz - wz * dr) / den;
        if (s > 0.0 && s < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12)
        {
          cut.push_back(s);
        }
      }
    }
    std::sort(cut.begin(), cut.end());
    for (size_t k = 0; k + 1 < cut.size(); k++)
    {
      const double len = cut[k + 1] - cut[k];
      if (len <= 1e-14)
        continue;
      const double sm = 0.5 * (cut[k] + cut[k + 1]);
      const Point m = {a[0] + sm * dr, a[1] + sm * dz};
      const int t = LocateChecked(m);
      const BasisValues bv = EvalBasis(basis_[t], m);
      for (int i = 0; i < basis_[t].size; i++)
      {
        const double v = comps_.one_sign[0] * bv.reg[i][comps_.one[0]] * dr +
                         comps_.one_sign[1] * bv.reg[i][comps_.one[1]] * dz;
        if (v != 0.0)
        {
          acc.Add(idx_[t][i], weight * len * sgn_[t][i] * v);
        }
      }
    }
  }

  const SpaceHandle &space_;
  const Mesh &mesh_;
  TriangleLocator locator_;
  DomainBox box_;
  FormComponents comps_;
  std::vector<LocalBasis> basis_;
  std::vector<std::array<int, 6>> idx_;
  std::vector<std::array<double, 6>> sgn_;
  std::vector<std::array<double, 6>> two_;
  std::vector<int> two_nz_;
  std::vector<std::array<double, 4>> tri_box_;
};

double TriangleSizeH(const Mesh &mesh) { return mesh.MaxH(); }

double PointSegmentDistance(const Point &p, const Point &a, const Point &b)
{
  const double dr = b[0] - a[0], dz = b[1] - a[1];
  const double len2 = dr * dr + dz * dz;
  double s = ((p[0] - a[0]) * dr + (p[1] - a[1]) * dz) / len2;
  s = std::clamp(s, 0.0, 1.0);
  const double er = a[0] + s * dr - p[0], ez = a[1] + s * dz - p[1];
  return std::sqrt(er * er + ez * ez);
}

Vec3 RegularValue(const SmoothForm &u, const Point &p)
{
  const auto pot = u.Potentials(p[0], p[1]);
  return {pot[0].v, pot[1].v, pot[2].v};
}

}  // namespace

// -----------------------------------------------------------------------------------------

double VertexDisk::Eta(const Point &y, int degree) const
{
  const Monomials mono = MonomialList(degree);
  const double x = (y[0] - center[0]) / rho, z = (y[1] - center[1]) / rho;
  double s = 0.0;
  for (size_t k = 0; k < mono.size(); k++)
  {
    s += eta_coef[k] * MonomialValue(mono[k], x, z);
  }
  return s;
}

VertexDisk BuildEta(const Point &a, bool half, double rho, int degree, int radial, int angular)
{
  if (degree < 0 || degree > 3)
  {
    throw std::invalid_argument("eta degree must be in 0..3");
  }
  VertexDisk d;
  d.center = a;
  d.half = half;
  d.rho = rho;
  d.scale = half ? rho : a[0];
  const QuadRule ref = DiskRule(radial, angular, half);
  const Monomials mono = MonomialList(degree);
  const int m = static_cast<int>(mono.size());
  const int nq = ref.Size();
  Eigen::MatrixXd p(nq, m);
  Eigen::VectorXd w3(nq);
  for (int q = 0; q < nq; q++)
  {
    const Point &y = ref.points[q];
    const double rs = half ? y[0] : 1.0 + rho * y[0] / a[0];
    w3[q] = ref.weights[q] * rs * rs * rs;
    for (int k = 0; k < m; k++)
    {
      p(q, k) = MonomialValue(mono[k], y[0], y[1]);
    }
  }
  const Eigen::MatrixXd g = p.transpose() * w3.asDiagonal() * p;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  e[0] = 1.0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const auto &sv = svd.singularValues();
  d.gram_condition = sv[0] / sv[sv.size() - 1];
  if (!(d.gram_condition < 1e12))
  {
    throw std::runtime_error("moment system is near singular (eta degree too large for the "
                             "disk rule)");
  }
  const Eigen::VectorXd c = g.ldlt().solve(e);
  const Eigen::VectorXd eta_hat = p * c;
  d.points.resize(nq);
  d.mu.resize(nq);
  for (int q = 0; q < nq; q++)
  {
    d.points[q] = {a[0] + rho * ref.points[q][0], a[1] + rho * ref.points[q][1]};
    d.mu[q] = w3[q] * eta_hat[q];
  }
  d.eta_coef = c / (rho * rho * std::pow(d.scale, 3));
  return d;
}

double EtaMomentError(const VertexDisk &disk, int degree, bool refine)
{
  const Monomials mono = MonomialList(degree);
  double err = 0.0;
  if (!refine)
  {
    for (size_t k = 0; k < mono.size(); k++)
    {
      double s = 0.0;
      for (size_t q = 0; q < disk.points.size(); q++)
      {
        const double x = (disk.points[q][0] - disk.center[0]) / disk.rho;
        const double z = (disk.points[q][1] - disk.center[1]) / disk.rho;
        s += disk.mu[q] * MonomialValue(mono[k], x, z);
      }
      err = std::max(err, std::abs(s - (k == 0 ? 1.0 : 0.0)));
    }
    return err;
  }
  const int radial = 2 * DefaultRadial(degree) + 4;
  const int angular = disk.half ? 2 * DefaultHalfAngular(degree) : 2 * DefaultAngular(degree) + 4;
  const QuadRule fine = DiskRule(radial, angular, disk.half, disk.center, disk.rho);
  for (size_t k = 0; k < mono.size(); k++)
  {
    double s = 0.0;
    for (int q = 0; q < fine.Size(); q++)
    {
      const Point &y = fine.points[q];
      const double x = (y[0] - disk.center[0]) / disk.rho;
      const double z = (y[1] - disk.center[1]) / disk.rho;
      s += fine.weights[q] * y[0] * y[0] * y[0] * disk.Eta(y, degree) *
           MonomialValue(mono[k], x, z);
    }
    err = std::max(err, std::abs(s - (k == 0 ? 1.0 : 0.0)));
  }
  return err;
}

std::vector<std::string> CheckSelectionRules(const Mesh &mesh, double delta)
{
  std::vector<std::string> out;
  const double h = TriangleSizeH(mesh);
  const double rho = delta * h;
  int patch = 0, overlap = 0, axis_gap = 0;
  double worst_patch = 0.0, worst_overlap = 0.0, worst_gap = 0.0;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    for (int i = 0; i < 3; i++)
    {
      const double d = PointSegmentDistance(mesh.Vertex(t, i), mesh.Vertex(t, (i + 1) % 3),
                                            mesh.Vertex(t, (i + 2) % 3));
      if (d < rho)
      {
        patch++;
        worst_patch = std::max(worst_patch, rho / d);
      }
    }
  }
  for (int e = 0; e < mesh.NumEdges(); e++)
  {
    const double len = mesh.EdgeLength(e);
    if (len <= 2 * rho)
    {
      overlap++;
      worst_overlap = std::max(worst_overlap, 2 * rho / len);
    }
  }
  for (int v = 0; v < mesh.NumVertices(); v++)
  {
    if (mesh.vertex_on_axis[v])
      continue;
    const double ra = mesh.vertices[v][0] - rho;
    if (ra < delta * h)
    {
      axis_gap++;
      worst_gap = std::max(worst_gap, delta * h / std::max(ra, 1e-300));
    }
  }
  auto msg = [&](int count, const char *what, double worst)
  {
    if (count > 0)
    {
      std::ostringstream os;
      os << what << ": " << count << " violation(s), worst ratio " << worst;
      out.push_back(os.str());
    }
  };
  msg(patch, "disk leaves its vertex patch", worst_patch);
  msg(overlap, "disks of neighbouring vertices overlap", worst_overlap);
  msg(axis_gap, "r_a below delta h", worst_gap);
  return out;
}

SmoothingConfig BuildSmoothingConfig(std::shared_ptr<const Mesh> mesh, const SmoothingOptions &opts)
{
  if (!(opts.delta > 0.0))
  {
    throw std::invalid_argument("delta must be positive");
  }
  SmoothingConfig cfg;
  cfg.mesh = mesh;
  cfg.delta_requested = opts.delta;
  cfg.eta_degree = opts.eta_degree;
  cfg.h = TriangleSizeH(*mesh);
  double delta = opts.delta;
  for (int it = 0;; it++)
  {
    const auto v = CheckSelectionRules(*mesh, delta);
    if (it == 0)
    {
      cfg.violations_at_request = v;
    }
    if (v.empty())
      break;
    if (!opts.auto_shrink)
    {
      throw std::runtime_error("smoothing-domain selection rules fail at delta = " +
                               std::to_string(delta) + ": " + v.front());
    }
    if (it >= opts.max_halvings)
    {
      throw std::runtime_error("no admissible delta found after halving");
    }
    delta *= 0.5;
    cfg.halvings++;
  }
  cfg.delta = delta;
  cfg.rho = delta * cfg.h;
  const int l = opts.eta_degree;
  cfg.radial = opts.radial > 0 ? opts.radial : DefaultRadial(l);
  cfg.angular = opts.angular > 0 ? opts.angular : DefaultAngular(l);
  cfg.half_angular = opts.half_angular > 0 ? opts.half_angular : DefaultHalfAngular(l);
  cfg.disks.reserve(mesh->NumVertices());
  for (int v = 0; v < mesh->NumVertices(); v++)
  {
    const bool half = mesh->vertex_on_axis[v];
    cfg.disks.push_back(BuildEta(mesh->vertices[v], half, cfg.rho, l, cfg.radial,
                                 half ? cfg.half_angular : cfg.angular));
  }
  return cfg;
}

SparseMatrix SmoothedDofMatrix(const SpaceHandle &space, const SmoothingConfig &cfg)
{
  const Mesh &mesh = space.GetMesh();
  if (cfg.mesh.get() != &mesh)
  {
    throw std::invalid_argument("smoothing configuration belongs to another mesh");
  }
  const SpaceKind kind = space.Kind();
  const int ndof = space.DofCount();
  const DiscreteSampler sampler(space);

  // Row tasks: (entity type, entity index) with 0 = vertex, 1 = edge, 2 = triangle.
  std::vector<std::array<int, 2>> tasks;
  if (kind == SpaceKind::A || kind == SpaceKind::B)
    for (int v = 0; v < mesh.NumVertices(); v++)
      tasks.push_back({0, v});
  if (kind == SpaceKind::B || kind == SpaceKind::C)
    for (int e = 0; e < mesh.NumEdges(); e++)
      tasks.push_back({1, e});
  if (kind == SpaceKind::C || kind == SpaceKind::D)
    for (int t = 0; t < mesh.NumTriangles(); t++)
      tasks.push_back({2, t});

  std::vector<std::vector<Eigen::Triplet<double>>> rows(tasks.size());
  ParallelFor(static_cast<int>(tasks.size()), [&](int begin, int end)
  {
    RowAccumulator acc(ndof);
    std::vector<int> cand;
    std::vector<Poly2> pieces;
    std::array<std::vector<int>, 8> regions;
    for (int task = begin; task < end; task++)
    {
      const int type = tasks[task][0], id = tasks[task][1];
      if (type == 0)
      {
        const VertexDisk &d = cfg.disks[id];
        for (size_t q = 0; q < d.points.size(); q++)
        {
          sampler.AddZero(acc, d.points[q], d.mu[q]);
        }
        acc.Flush(space.VertexDof(id), rows[task]);
      }
      else if (type == 1)
      {
        const VertexDisk &d0 = cfg.disks[mesh.edges[id][0]];
        const VertexDisk &d1 = cfg.disks[mesh.edges[id][1]];
        for (size_t q0 = 0; q0 < d0.points.size(); q0++)
        {
          for (size_t q1 = 0; q1 < d1.points.size(); q1++)
          {
            sampler.AddOne(acc, d0.points[q0], d1.points[q1], d0.mu[q0] * d1.mu[q1], cand);
          }
        }
        acc.Flush(space.EdgeDof(id), rows[task]);
      }
      else
      {
        const VertexDisk &d0 = cfg.disks[mesh.triangles[id][0]];
        const VertexDisk &d1 = cfg.disks[mesh.triangles[id][1]];
        const VertexDisk &d2 = cfg.disks[mesh.triangles[id][2]];
        const double inv_area = 1.0 / mesh.Area(id);
        Point lo = {1e300, 1e300}, hi = {-1e300, -1e300};
        for (const VertexDisk *d : {&d0, &d1, &d2})
        {
          for (const Point &p : d->points)
          {
            lo = {std::min(lo[0], p[0]), std::min(lo[1], p[1])};
            hi = {std::max(hi[0], p[0]), std::max(hi[1], p[1])};
          }
        }
        sampler.PrepareRegions(lo, hi, regions);
        Poly2 tri;
        tri.size = 3;
        for (size_t q0 = 0; q0 < d0.points.size(); q0++)
        {
          tri.p[0] = d0.points[q0];
          for (size_t q1 = 0; q1 < d1.points.size(); q1++)
          {
            tri.p[1] = d1.points[q1];
            const double w01 = d0.mu[q0] * d1.mu[q1] * inv_area;
            for (size_t q2 = 0; q2 < d2.points.size(); q2++)
            {
              tri.p[2] = d2.points[q2];
              sampler.AddTwo(acc, tri, w01 * d2.mu[q2], pieces, regions);
            }
          }
        }
        acc.Flush(space.TriangleDof(id), rows[task]);
      }
    }
  });
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto &row : rows)
  {
    trip.insert(trip.end(), row.begin(), row.end());
  }
  SparseMatrix r(ndof, ndof);
  r.setFromTriplets(trip.begin(), trip.end());
  return r;
}

Eigen::VectorXd SmoothedDofs(const SpaceHandle &space, const SmoothForm &u,
                             const SmoothingConfig &cfg, int degree)
{
  const Mesh &mesh = space.GetMesh();
  const SpaceKind kind = space.Kind();
  if (u.kind != kind || u.n != space.Mode())
  {
    throw std::invalid_argument("smooth form does not match the space");
  }
  const FormComponents comps = ComponentsOf(kind);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.DofCount());
  const QuadRule &erule = EdgeRule(degree);
  const QuadRule &trule = TriangleRule(degree);
  double tref = 0.0;
  for (double w : trule.weights)
    tref += w;

  if (kind == SpaceKind::A || kind == SpaceKind::B)
  {
    for (int v = 0; v < mesh.NumVertices(); v++)
    {
      const VertexDisk &d = cfg.disks[v];
      double s = 0.0;
      for (size_t q = 0; q < d.points.size(); q++)
      {
        s += d.mu[q] * RegularValue(u, d.points[q])[comps.zero];
      }
      out[space.VertexDof(v)] = s;
    }
  }
  if (kind == SpaceKind::B || kind == SpaceKind::C)
  {
    for (int e = 0; e < mesh.NumEdges(); e++)
    {
      const VertexDisk &d0 = cfg.disks[mesh.edges[e][0]];
      const VertexDisk &d1 = cfg.disks[mesh.edges[e][1]];
      double s = 0.0;
      for (size_t q0 = 0; q0 < d0.points.size(); q0++)
      {
        for (size_t q1 = 0; q1 < d1.points.size(); q1++)
        {
          const Point &a = d0.points[q0], &b = d1.points[q1];
          const double dr = b[0] - a[0], dz = b[1] - a[1];
          double seg = 0.0;
          for (int g = 0; g < erule.Size(); g++)
          {
            const double x = erule.points[g][0];
            const Vec3 reg = RegularValue(u, {a[0] + x * dr, a[1] + x * dz});
            seg += erule.weights[g] * (comps.one_sign[0] * reg[comps.one[0]] * dr +
                                       comps.one_sign[1] * reg[comps.one[1]] * dz);
          }
          s += d0.mu[q0] * d1.mu[q1] * seg;
        }
      }
      out[space.EdgeDof(e)] = s;
    }
  }
  if (kind == SpaceKind::C || kind == SpaceKind::D)
  {
    for (int t = 0; t < mesh.NumTriangles(); t++)
    {
      const VertexDisk &d0 = cfg.disks[mesh.triangles[t][0]];
      const VertexDisk &d1 = cfg.disks[mesh.triangles[t][1]];
      const VertexDisk &d2 = cfg.disks[mesh.triangles[t][2]];
      double s = 0.0;
      for (size_t q0 = 0; q0 < d0.points.size(); q0++)
      {
        for (size_t q1 = 0; q1 < d1.points.size(); q1++)
        {
          for (size_t q2 = 0; q2 < d2.points.size(); q2++)
          {
            const Point &a = d0.points[q0], &b = d1.points[q1], &c = d2.points[q2];
            const double jac = Cross(a, b, c);  // twice the signed area
            double tri = 0.0;
            for (int g = 0; g < trule.Size(); g++)
            {
              const double x = trule.points[g][0], y = trule.points[g][1];
              const Point p = {a[0] + x * (b[0] - a[0]) + y * (c[0] - a[0]),
                               a[1] + x * (b[1] - a[1]) + y * (c[1] - a[1])};
              tri += trule.weights[g] * RegularValue(u, p)[comps.two];
            }
            s += d0.mu[q0] * d1.mu[q1] * d2.mu[q2] * tri * jac * (0.5 / tref);
          }
        }
      }
      out[space.TriangleDof(t)] = s / mesh.Area(t);
    }
  }
  return out;
}

double LiteralVertexDof(const SpaceHandle &space, const SmoothForm &u, const SmoothingConfig &cfg,
                        int vertex)
{
  const SpaceKind kind = space.Kind();
  if (kind != SpaceKind::A && kind != SpaceKind::B)
  {
    throw std::invalid_argument("literal vertex DOF needs the A or B space");
  }
  const Mesh &mesh = space.GetMesh();
  const int t = mesh.vertex_owner_tri[vertex];
  const auto lam = Barycentric(mesh, t, mesh.vertices[vertex]);
  const VertexDisk *d[3];
  for (int i = 0; i < 3; i++)
  {
    d[i] = &cfg.disks[mesh.triangles[t][i]];
  }
  double s = 0.0;
  for (size_t q0 = 0; q0 < d[0]->points.size(); q0++)
  {
    for (size_t q1 = 0; q1 < d[1]->points.size(); q1++)
    {
      for (size_t q2 = 0; q2 < d[2]->points.size(); q2++)
      {
        const Point &y0 = d[0]->points[q0], &y1 = d[1]->points[q1], &y2 = d[2]->points[q2];
        const Point x = {lam[0] * y0[0] + lam[1] * y1[0] + lam[2] * y2[0],
                         lam[0] * y0[1] + lam[1] * y1[1] + lam[2] * y2[1]};
        s += d[0]->mu[q0] * d[1]->mu[q1] * d[2]->mu[q2] * RegularValue(u, x)[0];
      }
    }
  }
  return s;
}

double MassNorm(const Eigen::MatrixXd &mass, const Eigen::MatrixXd &a)
{
  const Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success)
  {
    throw std::runtime_error("mass matrix is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  // B = L^T A L^{-T}
  const Eigen::MatrixXd lta = l.transpose() * a;
  const Eigen::MatrixXd b =
      l.triangularView<Eigen::Lower>().solve(lta.transpose()).transpose();
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(b);
  return svd.singularValues()[0];
}

Eigen::VectorXd ProjectionOperator::Apply(const SmoothForm &u, int degree) const
{
  return j * SmoothedDofs(space, u, cfg, degree);
}

Eigen::VectorXd ProjectionOperator::ApplyDiscrete(const Eigen::VectorXd &coeffs) const
{
  return j * (r * coeffs);
}

ProjectionOperator BuildProjection(const SpaceHandle &space, const SmoothingConfig &cfg)
{
  ProjectionOperator op;
  op.space = space;
  op.cfg = cfg;
  op.mass = Eigen::MatrixXd(MassMatrix(space).mat);
  op.r = Eigen::MatrixXd(SmoothedDofMatrix(space, cfg));
  const int n = space.DofCount();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.r);
  op.j = lu.inverse();
  if (!op.j.allFinite())
  {
    throw std::runtime_error("smoothed DOF matrix is singular");
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  op.inverse_error = (op.j * op.r - eye).cwiseAbs().maxCoeff();
  op.neumann = MassNorm(op.mass, op.r - eye);
  op.j_norm = MassNorm(op.mass, op.j);
  return op;
}

InverseRatios MeasureInverseRatios(const Mesh &mesh, int degree, int samples, std::uint64_t seed)
{
  InverseRatios out;
  std::normal_distribution<double> normal(0.0, 1.0);
  const Monomials mono = MonomialList(degree);
  const Monomials mono4 = MonomialList(std::max(degree - 1, 0));
  const int m = static_cast<int>(mono.size());
  const int m4 = static_cast<int>(mono4.size());
  const QuadRule &ref = TriangleRule(2 * degree + 4);
  const int grid = 16;
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const Point a = mesh.Vertex(t, 0), b = mesh.Vertex(t, 1), c = mesh.Vertex(t, 2);
    const double hk = mesh.Diameter(t);
    const Point cen = mesh.Centroid(t);
    const double rk = std::max({a[0], b[0], c[0]});
    const QuadRule rule = MapToTriangle(ref, a, b, c);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m), stiff = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd m4a = Eigen::MatrixXd::Zero(m4, m4), m4b = Eigen::MatrixXd::Zero(m4, m4);
    for (int q = 0; q < rule.Size(); q++)
    {
      const Point &p = rule.points[q];
      const double x = (p[0] - cen[0]) / hk, z = (p[1] - cen[1]) / hk;
      Eigen::VectorXd v(m), gr(m), gz(m);
      for (int k = 0; k < m; k++)
      {
        const int i = mono[k][0], j = mono[k][1];
        v[k] = MonomialValue(mono[k], x, z);
        gr[k] = i > 0 ? i * std::pow(x, i - 1) * std::pow(z, j) / hk : 0.0;
        gz[k] = j > 0 ? j * std::pow(x, i) * std::pow(z, j - 1) / hk : 0.0;
      }
      const double w = rule.weights[q] * p[0];
      mass += w * v * v.transpose();
      stiff += w * (gr * gr.transpose() + gz * gz.transpose());
      Eigen::VectorXd v4(m4);
      for (int k = 0; k < m4; k++)
      {
        v4[k] = MonomialValue(mono4[k], x, z);
      }
      m4a += w * rk * rk * v4 * v4.transpose();
      m4b += w * p[0] * p[0] * v4 * v4.transpose();
    }
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> g1(stiff, mass,
                                                                       Eigen::EigenvaluesOnly);
    out.inv1 = std::max(out.inv1, hk * hk * g1.eigenvalues().maxCoeff());
    const bool axis = mesh.vertex_on_axis[mesh.triangles[t][0]] ||
                      mesh.vertex_on_axis[mesh.triangles[t][1]] ||
                      mesh.vertex_on_axis[mesh.triangles[t][2]];
    if (axis)
    {
      const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> g4(m4a, m4b,
                                                                         Eigen::EigenvaluesOnly);
      out.inv4 = std::max(out.inv4, g4.eigenvalues().maxCoeff());
    }
    // Basis values and gradients on a barycentric lattice.
    const int npts = (grid + 1) * (grid + 2) / 2;
    Eigen::MatrixXd phi(npts, m), phr(npts, m), phz(npts, m);
    int row = 0;
    for (int i = 0; i <= grid; i++)
    {
      for (int j = 0; i + j <= grid; j++, row++)
      {
        const double l1 = double(i) / grid, l2 = double(j) / grid, l0 = 1.0 - l1 - l2;
        const double x = (l0 * a[0] + l1 * b[0] + l2 * c[0] - cen[0]) / hk;
        const double z = (l0 * a[1] + l1 * b[1] + l2 * c[1] - cen[1]) / hk;
        for (int k = 0; k < m; k++)
        {
          const int e0 = mono[k][0], e1 = mono[k][1];
          phi(row, k) = MonomialValue(mono[k], x, z);
          phr(row, k) = e0 > 0 ? e0 * std::pow(x, e0 - 1) * std::pow(z, e1) / hk : 0.0;
          phz(row, k) = e1 > 0 ? e1 * std::pow(x, e0) * std::pow(z, e1 - 1) / hk : 0.0;
        }
      }
    }
    // (inv3): sup_v v(x)^2 / |v|_r^2 = phi(x)^T M^{-1} phi(x).
    const Eigen::LLT<Eigen::MatrixXd> llt(mass);
    const Eigen::MatrixXd half = llt.matrixL().solve(phi.transpose());
    out.inv3 = std::max(out.inv3, rk * hk * hk * half.colwise().squaredNorm().maxCoeff());
    // (inv2): the same seeded samples on every triangle, plus v = 1.
    std::mt19937_64 local(seed);
    for (int s = 0; s <= samples; s++)
    {
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(m);
      if (s == 0)
        coef[0] = 1.0;
      else
        for (int k = 0; k < m; k++)
          coef[k] = normal(local);
      const double vmax = (phi * coef).cwiseAbs().maxCoeff();
      const Eigen::VectorXd gr = phr * coef, gz = phz * coef;
      const double gmax = (gr.cwiseAbs2() + gz.cwiseAbs2()).maxCoeff();
      if (vmax > 0.0)
      {
        out.inv2 = std::max(out.inv2, hk * hk * gmax / (vmax * vmax));
      }
    }
  }
  return out;
}

double ReferenceInv3ConstantRatio()
{
  const Mesh mesh = BuildMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  const double hk = mesh.Diameter(0);
  const double rk = 1.0;
  const QuadRule rule = MapToTriangle(TriangleRule(2), {0, 0}, {1, 0}, {0, 1});
  double l2r = 0.0;
  for (int q = 0; q < rule.Size(); q++)
    l2r += rule.weights[q] * rule.points[q][0];
  return rk * hk * hk / l2r;
}

SmoothForm PolynomialTestForm(SpaceKind kind, int n)
{
  SmoothForm f;
  f.kind = kind;
  f.n = n;
  f.pot[0] = [](const Jet &r, const Jet &z) { return r * z; };
  f.pot[1] = [](const Jet &r, const Jet &) { return r * r; };
  f.pot[2] = [](const Jet &, const Jet &z) { return z; };
  return f;
}

SmoothForm SmoothTestForm(SpaceKind kind, int n)
{
  SmoothForm f;
  f.kind = kind;
  f.n = n;
  f.pot[0] = [](const Jet &r, const Jet &z) { return sin(z) * r; };
  f.pot[1] = [](const Jet &r, const Jet &) { return r * r; };
  f.pot[2] = [](const Jet &r, const Jet &z) { return z * r; };
  return f;
}

}  // namespace ffem
