// SPDX-License-Identifier: Apache-2.0

#ifndef FFEM_MESH_HPP
#define FFEM_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace ffem
{

using Point = std::array<double, 2>;  // (r, z)

enum class BoundaryTag
{
  Interior,
  Gamma0,  // on the symmetry axis r = 0
  Gamma1
};

// Conforming triangulation of the meridian half plane. Triangles are counterclockwise,
// local edge i is opposite local vertex i and is traversed from vertex i+1 to vertex i+2
// (indices mod 3). Global edges run from the lower to the higher vertex index.
struct Mesh
{
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<std::array<int, 3>> tri_edge_signs;
  std::vector<std::array<int, 2>> edge_tris;  // second entry -1 on the boundary
  std::vector<BoundaryTag> edge_tags;
  std::vector<bool> vertex_on_axis;
  std::vector<bool> vertex_on_gamma1;
  std::vector<int> vertex_owner_tri;  // one incident triangle per vertex

  int NumVertices() const { return static_cast<int>(vertices.size()); }
  int NumEdges() const { return static_cast<int>(edges.size()); }
  int NumTriangles() const { return static_cast<int>(triangles.size()); }

  Point Vertex(int t, int i) const { return vertices[triangles[t][i]]; }
  double Area(int t) const;
  double Diameter(int t) const;
  double Inradius(int t) const;
  Point Centroid(int t) const;
  double MaxH() const;
  double MinH() const;
  double ShapeRegularity() const;  // max over K of h_K / inradius_K
  double EdgeLength(int e) const;
  int EulerCharacteristic() const { return NumVertices() - NumEdges() + NumTriangles(); }
};

// Derive edges, signs, adjacency and boundary tags from vertices and CCW triangles.
// Vertices with |r| <= axis_tol are snapped onto the axis.
Mesh BuildMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
               double axis_tol = 0.0);

Mesh GenerateUnitSquare(int level);
Mesh RefineUniform(const Mesh &mesh);

// Text format: "nv nt", then nv lines "r z", then nt lines "i j k" (0-based).
Mesh ReadMesh(std::istream &is, std::vector<std::string> *warnings = nullptr);
Mesh ReadMeshString(const std::string &text, std::vector<std::string> *warnings = nullptr);
void WriteMesh(std::ostream &os, const Mesh &mesh);
std::string WriteMeshString(const Mesh &mesh);

// Barycentric coordinates of p in triangle t.
std::array<double, 3> Barycentric(const Mesh &mesh, int t, const Point &p);

// Bucket grid for point location.
class TriangleLocator
{
public:
  explicit TriangleLocator(const Mesh &mesh, int buckets_per_side = 0);
  // Returns a triangle containing p within tolerance, or -1.
  int Locate(const Point &p, double tol = 1e-12) const;
  // Candidate triangles whose bounding boxes overlap the box [lo, hi].
  void Candidates(const Point &lo, const Point &hi, std::vector<int> &out) const;

private:
  const Mesh &mesh_;
  int nb_;
  double r0_, z0_, dr_, dz_;
  std::vector<std::vector<int>> buckets_;
  std::vector<std::array<double, 4>> boxes_;
  int Bucket(double v, double v0, double dv) const;
};

}  // namespace ffem

#endif  // FFEM_MESH_HPP
