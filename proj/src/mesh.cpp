// SPDX-License-Identifier: Apache-2.0

#include "ffem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ffem
{

namespace
{

double Dist(const Point &a, const Point &b)
{
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

double SignedArea(const Point &a, const Point &b, const Point &c)
{
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

}  // namespace

double Mesh::Area(int t) const
{
  return SignedArea(Vertex(t, 0), Vertex(t, 1), Vertex(t, 2));
}

double Mesh::Diameter(int t) const
{
  const Point a = Vertex(t, 0), b = Vertex(t, 1), c = Vertex(t, 2);
  return std::max({Dist(a, b), Dist(b, c), Dist(c, a)});
}

double Mesh::Inradius(int t) const
{
  const Point a = Vertex(t, 0), b = Vertex(t, 1), c = Vertex(t, 2);
  const double s = 0.5 * (Dist(a, b) + Dist(b, c) + Dist(c, a));
  return Area(t) / s;
}

Point Mesh::Centroid(int t) const
{
  const Point a = Vertex(t, 0), b = Vertex(t, 1), c = Vertex(t, 2);
  return {(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0};
}

double Mesh::MaxH() const
{
  double h = 0.0;
  for (int t = 0; t < NumTriangles(); t++)
  {
    h = std::max(h, Diameter(t));
  }
  return h;
}

double Mesh::MinH() const
{
  double h = std::numeric_limits<double>::max();
  for (int t = 0; t < NumTriangles(); t++)
  {
    h = std::min(h, Diameter(t));
  }
  return h;
}

double Mesh::ShapeRegularity() const
{
  double s = 0.0;
  for (int t = 0; t < NumTriangles(); t++)
  {
    s = std::max(s, Diameter(t) / Inradius(t));
  }
  return s;
}

double Mesh::EdgeLength(int e) const
{
  return Dist(vertices[edges[e][0]], vertices[edges[e][1]]);
}

Mesh BuildMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
               double axis_tol)
{
  Mesh mesh;
  for (auto &v : vertices)
  {
    if (v[0] < -axis_tol)
    {
      throw std::invalid_argument("mesh vertex with negative r coordinate");
    }
    if (std::abs(v[0]) <= axis_tol)
    {
      v[0] = 0.0;
    }
  }
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  const int nv = mesh.NumVertices();
  const int nt = mesh.NumTriangles();
  for (const auto &tri : mesh.triangles)
  {
    for (int v : tri)
    {
      if (v < 0 || v >= nv)
      {
        throw std::invalid_argument("triangle references a missing vertex");
      }
    }
  }

  std::map<std::pair<int, int>, int> edge_index;
  mesh.tri_edges.resize(nt);
  mesh.tri_edge_signs.resize(nt);
  for (int t = 0; t < nt; t++)
  {
    if (!(mesh.Area(t) > 0.0))
    {
      throw std::invalid_argument("triangle " + std::to_string(t) +
                                  " is degenerate or clockwise");
    }
    for (int i = 0; i < 3; i++)
    {
      const int a = mesh.triangles[t][(i + 1) % 3];
      const int b = mesh.triangles[t][(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_index.find(key);
      int e;
      if (it == edge_index.end())
      {
        e = mesh.NumEdges();
        edge_index.emplace(key, e);
        mesh.edges.push_back({key.first, key.second});
        mesh.edge_tris.push_back({t, -1});
      }
      else
      {
        e = it->second;
        if (mesh.edge_tris[e][1] != -1)
        {
          throw std::invalid_argument("non-conforming mesh: edge shared by more than two "
                                      "triangles");
        }
        mesh.edge_tris[e][1] = t;
      }
      mesh.tri_edges[t][i] = e;
      mesh.tri_edge_signs[t][i] = (a < b) ? 1 : -1;
    }
  }

  mesh.vertex_on_axis.assign(nv, false);
  mesh.vertex_on_gamma1.assign(nv, false);
  mesh.vertex_owner_tri.assign(nv, -1);
  for (int v = 0; v < nv; v++)
  {
    mesh.vertex_on_axis[v] = (mesh.vertices[v][0] == 0.0);
  }
  for (int t = 0; t < nt; t++)
  {
    for (int v : mesh.triangles[t])
    {
      if (mesh.vertex_owner_tri[v] < 0)
      {
        mesh.vertex_owner_tri[v] = t;
      }
    }
  }
  mesh.edge_tags.assign(mesh.NumEdges(), BoundaryTag::Interior);
  for (int e = 0; e < mesh.NumEdges(); e++)
  {
    if (mesh.edge_tris[e][1] >= 0)
    {
      continue;
    }
    const int a = mesh.edges[e][0], b = mesh.edges[e][1];
    if (mesh.vertex_on_axis[a] && mesh.vertex_on_axis[b])
    {
      mesh.edge_tags[e] = BoundaryTag::Gamma0;
    }
    else
    {
      mesh.edge_tags[e] = BoundaryTag::Gamma1;
      mesh.vertex_on_gamma1[a] = true;
      mesh.vertex_on_gamma1[b] = true;
    }
  }
  return mesh;
}

Mesh GenerateUnitSquare(int level)
{
  if (level < 1 || level > 12)
  {
    throw std::invalid_argument("unit square level must lie in 1..12");
  }
  const int m = 1 << level;
  std::vector<Point> vertices;
  vertices.reserve((m + 1) * (m + 1));
  for (int j = 0; j <= m; j++)
  {
    for (int i = 0; i <= m; i++)
    {
      vertices.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m});
    }
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * m * m);
  auto id = [m](int i, int j) { return j * (m + 1) + i; };
  for (int j = 0; j < m; j++)
  {
    for (int i = 0; i < m; i++)
    {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return BuildMesh(std::move(vertices), std::move(triangles));
}

Mesh RefineUniform(const Mesh &mesh)
{
  const int nv = mesh.NumVertices();
  std::vector<Point> vertices = mesh.vertices;
  vertices.reserve(nv + mesh.NumEdges());
  for (const auto &e : mesh.edges)
  {
    const Point &a = mesh.vertices[e[0]], &b = mesh.vertices[e[1]];
    vertices.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * mesh.NumTriangles());
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const auto &v = mesh.triangles[t];
    const int m0 = nv + mesh.tri_edges[t][0];
    const int m1 = nv + mesh.tri_edges[t][1];
    const int m2 = nv + mesh.tri_edges[t][2];
    triangles.push_back({v[0], m2, m1});
    triangles.push_back({m2, v[1], m0});
    triangles.push_back({m1, m0, v[2]});
    triangles.push_back({m0, m1, m2});
  }
  return BuildMesh(std::move(vertices), std::move(triangles));
}

Mesh ReadMesh(std::istream &is, std::vector<std::string> *warnings)
{
  auto next_line = [&is](std::istringstream &ls, const char *what)
  {
    std::string line;
    while (std::getline(is, line))
    {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
      {
        ls.clear();
        ls.str(line);
        return;
      }
    }
    throw std::invalid_argument(std::string("mesh file truncated while reading ") + what);
  };
  std::istringstream ls;
  next_line(ls, "header");
  long nv = -1, nt = -1;
  if (!(ls >> nv >> nt) || nv < 3 || nt < 1)
  {
    throw std::invalid_argument("malformed mesh header");
  }
  std::vector<Point> vertices(nv);
  for (long i = 0; i < nv; i++)
  {
    next_line(ls, "vertices");
    if (!(ls >> vertices[i][0] >> vertices[i][1]))
    {
      throw std::invalid_argument("malformed vertex line " + std::to_string(i));
    }
  }
  std::vector<std::array<int, 3>> triangles(nt);
  for (long t = 0; t < nt; t++)
  {
    next_line(ls, "triangles");
    if (!(ls >> triangles[t][0] >> triangles[t][1] >> triangles[t][2]))
    {
      throw std::invalid_argument("malformed triangle line " + std::to_string(t));
    }
    for (int v : triangles[t])
    {
      if (v < 0 || v >= nv)
      {
        throw std::invalid_argument("triangle line " + std::to_string(t) +
                                    " references a missing vertex");
      }
    }
    const double a = SignedArea(vertices[triangles[t][0]], vertices[triangles[t][1]],
                                vertices[triangles[t][2]]);
    if (a < 0.0)
    {
      std::swap(triangles[t][1], triangles[t][2]);
      if (warnings)
      {
        warnings->push_back("triangle " + std::to_string(t) +
                            " was clockwise; reordered counterclockwise");
      }
    }
  }
  double rmin = vertices[0][0], rmax = rmin, zmin = vertices[0][1], zmax = zmin;
  for (const auto &v : vertices)
  {
    rmin = std::min(rmin, v[0]);
    rmax = std::max(rmax, v[0]);
    zmin = std::min(zmin, v[1]);
    zmax = std::max(zmax, v[1]);
  }
  const double diam = std::hypot(rmax - rmin, zmax - zmin);
  return BuildMesh(std::move(vertices), std::move(triangles), 1e-14 * diam);
}

Mesh ReadMeshString(const std::string &text, std::vector<std::string> *warnings)
{
  std::istringstream is(text);
  return ReadMesh(is, warnings);
}

void WriteMesh(std::ostream &os, const Mesh &mesh)
{
  os << mesh.NumVertices() << " " << mesh.NumTriangles() << "\n";
  os << std::setprecision(17);
  for (const auto &v : mesh.vertices)
  {
    os << v[0] << " " << v[1] << "\n";
  }
  for (const auto &t : mesh.triangles)
  {
    os << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
}

std::string WriteMeshString(const Mesh &mesh)
{
  std::ostringstream os;
  WriteMesh(os, mesh);
  return os.str();
}

std::array<double, 3> Barycentric(const Mesh &mesh, int t, const Point &p)
{
  const Point a = mesh.Vertex(t, 0), b = mesh.Vertex(t, 1), c = mesh.Vertex(t, 2);
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
  const double l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
  const double l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
  return {1.0 - l1 - l2, l1, l2};
}

TriangleLocator::TriangleLocator(const Mesh &mesh, int buckets_per_side) : mesh_(mesh)
{
  nb_ = buckets_per_side > 0
            ? buckets_per_side
            : std::max(1, static_cast<int>(std::sqrt(mesh.NumTriangles() / 2.0)));
  double rmin = mesh.vertices[0][0], rmax = rmin, zmin = mesh.vertices[0][1], zmax = zmin;
  for (const auto &v : mesh.vertices)
  {
    rmin = std::min(rmin, v[0]);
    rmax = std::max(rmax, v[0]);
    zmin = std::min(zmin, v[1]);
    zmax = std::max(zmax, v[1]);
  }
  r0_ = rmin;
  z0_ = zmin;
  dr_ = (rmax - rmin) / nb_;
  dz_ = (zmax - zmin) / nb_;
  buckets_.resize(nb_ * nb_);
  boxes_.resize(mesh.NumTriangles());
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    std::array<double, 4> box = {1e300, -1e300, 1e300, -1e300};
    for (int i = 0; i < 3; i++)
    {
      const Point p = mesh.Vertex(t, i);
      box[0] = std::min(box[0], p[0]);
      box[1] = std::max(box[1], p[0]);
      box[2] = std::min(box[2], p[1]);
      box[3] = std::max(box[3], p[1]);
    }
    boxes_[t] = box;
    const int i0 = Bucket(box[0], r0_, dr_), i1 = Bucket(box[1], r0_, dr_);
    const int j0 = Bucket(box[2], z0_, dz_), j1 = Bucket(box[3], z0_, dz_);
    for (int j = j0; j <= j1; j++)
    {
      for (int i = i0; i <= i1; i++)
      {
        buckets_[j * nb_ + i].push_back(t);
      }
    }
  }
}

int TriangleLocator::Bucket(double v, double v0, double dv) const
{
  const int b = static_cast<int>(std::floor((v - v0) / dv));
  return std::clamp(b, 0, nb_ - 1);
}

int TriangleLocator::Locate(const Point &p, double tol) const
{
  const int i = Bucket(p[0], r0_, dr_), j = Bucket(p[1], z0_, dz_);
  int best = -1;
  double best_min = -1e300;
  for (int t : buckets_[j * nb_ + i])
  {
    const auto l = Barycentric(mesh_, t, p);
    const double lmin = std::min({l[0], l[1], l[2]});
    if (lmin >= 0.0)
    {
      return t;
    }
    if (lmin > best_min)
    {
      best_min = lmin;
      best = t;
    }
  }
  return (best_min >= -tol) ? best : -1;
}

void TriangleLocator::Candidates(const Point &lo, const Point &hi, std::vector<int> &out) const
{
  out.clear();
  const int i0 = Bucket(lo[0], r0_, dr_), i1 = Bucket(hi[0], r0_, dr_);
  const int j0 = Bucket(lo[1], z0_, dz_), j1 = Bucket(hi[1], z0_, dz_);
  for (int j = j0; j <= j1; j++)
  {
    for (int i = i0; i <= i1; i++)
    {
      for (int t : buckets_[j * nb_ + i])
      {
        const auto &b = boxes_[t];
        if (b[0] <= hi[0] && b[1] >= lo[0] && b[2] <= hi[1] && b[3] >= lo[1])
        {
          out.push_back(t);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace ffem
