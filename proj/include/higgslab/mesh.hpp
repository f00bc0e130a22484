#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "higgslab/surface.hpp"
#include "higgslab/types.hpp"

namespace higgslab {

// Cone-aware triangulation of a translation surface.
//
// Triangles live in the cut polygon: each triangle corner is a *node* with a
// position in the polygon plane.  Nodes on paired edges (and the polygon
// corners) are glued into *vertices*, which carry the degrees of freedom.
// Every per-vertex field in the library is indexed by vertex id.
class Mesh {
 public:
  struct Edge {
    int i = 0;
    int j = 0;       // i < j
    double weight;   // cotangent weight, summed over both adjacent triangles
  };
  // Flat displacement from a vertex to one of its neighbours.  Valid because
  // gluings are translations; at the cone vertex different neighbours lie on
  // different sheets.
  struct Neighbor {
    int vertex = 0;
    Complex offset;
  };

  // Node layer (cut polygon).
  std::vector<Complex> node_position;
  std::vector<int> node_vertex;
  std::vector<std::array<int, 3>> triangles;  // node ids, counter-clockwise

  // Vertex layer (identified surface).
  std::vector<Complex> vertex_position;  // a representative node position
  RealField vertex_area;                 // lumped mass (mixed Voronoi area)
  RealField cone_distance;               // intrinsic distance to the cone point
  std::vector<Complex> cone_offset;      // position relative to the nearest cone copy
  std::vector<std::vector<Neighbor>> neighbors;
  std::vector<Edge> edges;
  int cone_vertex = -1;

  // W with W_ij = w_ij, W_ii = -sum_j w_ij (negative semidefinite).
  Eigen::SparseMatrix<double> stiffness;

  double polygon_area = 0.0;
  std::vector<Complex> cone_copies;  // polygon corners (all copies of the cone point)
  int flips = 0;                     // Delaunay flips performed during construction

  int num_vertices() const { return static_cast<int>(vertex_position.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_nodes() const { return static_cast<int>(node_position.size()); }

  // Vertex ids of a triangle.
  std::array<int, 3> triangle_vertices(int t) const {
    const auto& tr = triangles[t];
    return {node_vertex[tr[0]], node_vertex[tr[1]], node_vertex[tr[2]]};
  }
  double triangle_area(int t) const;

  // V - E + F of the identified complex.
  int euler_characteristic() const;
  // Sum of triangle angles incident to the cone vertex.
  double cone_angle_sum() const;
  double shortest_edge_at(int vertex) const;
  double max_edge_length() const;
  double min_cotan_weight() const;

  // Distance from a point of the polygon to the nearest cone copy and the
  // corresponding local offset.
  double distance_to_cone(Complex p, Complex* offset = nullptr) const;

  // Triangle containing p (polygon coordinates), with barycentric coords.
  std::optional<int> locate(Complex p, std::array<double, 3>* bary = nullptr) const;

  void build_locator();

 private:
  // Uniform bucket grid over the polygon bounding box.
  std::vector<std::vector<int>> buckets_;
  Complex grid_origin_;
  double grid_cell_ = 1.0;
  int grid_nx_ = 0;
  int grid_ny_ = 0;
};

// Structured triangulation: fan the polygon from its centroid, subdivide each
// fan triangle uniformly, then grade the nodes radially toward every polygon
// corner.  cone_grading = 1 means no grading; smaller values concentrate
// nodes near the cone with radial exponent 1 / cone_grading.  Non-Delaunay
// interior edges are flipped; a negative weight that survives (on a glued
// edge) throws MeshError.
Mesh triangulate(const TranslationSurface& surface, double target_edge_length, double cone_grading);

// (1/area_i) * sum_j w_ij (f_j - f_i): lumped cotangent Laplacian (= 4 d_z d_zbar).
RealField laplacian_apply(const Mesh& mesh, const RealField& field);

// sum_i f_i * area_i
double integrate(const Mesh& mesh, const RealField& field);

// Least-squares polynomial fit of a vertex field on the 2-ring of a vertex.
// Returns false if the neighbourhood is degenerate or touches the cone.
struct LocalJet {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double laplacian = 0.0;
  Complex dz() const { return 0.5 * Complex(dx, -dy); }
  Complex dzbar() const { return 0.5 * Complex(dx, dy); }
};
bool fit_jet(const Mesh& mesh, const RealField& field, int vertex, int degree, LocalJet& jet);

// CSV dumps.  The vertex file has one row per node of the cut polygon
// (vertex_id = node id, class_id = glued vertex id); the triangle file lists
// node and vertex ids of every triangle.
void write_mesh_vertices_csv(std::ostream& out, const Mesh& mesh);
void write_mesh_triangles_csv(std::ostream& out, const Mesh& mesh);

}  // namespace higgslab
