#include "higgslab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace higgslab {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

// cot of the angle at `apex` in the triangle (apex, p, q).
double cot_at(Complex apex, Complex p, Complex q) {
  const Complex u = p - apex;
  const Complex v = q - apex;
  return dot(u, v) / std::abs(cross(u, v));
}

double angle_at(Complex apex, Complex p, Complex q) {
  const Complex u = p - apex;
  const Complex v = q - apex;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

// Radial grading profile on [0, 1]: ~ s^p near 0, identity with unit slope at 1.
double grading_profile(double s, double p) {
  if (s >= 1.0) return s;
  const double w = s * s * (3.0 - 2.0 * s);
  return w * s + (1.0 - w) * std::pow(s, p);
}

// Lattice node bookkeeping for the fan subdivision.
struct FanIndexer {
  int sectors;
  int n;
  int center = 0;
  // spoke k, index 1..n  -> id
  int spoke_id(int k, int idx) const { return 1 + ((k % sectors) * n) + (idx - 1); }
  int interior_base() const { return 1 + sectors * n; }
  // sector j, (a, b) with a >= 1, b >= 1, a + b <= n
  int per_sector() const { return n * (n - 1) / 2; }
  int interior_id(int j, int a, int b) const {
    // enumerate b = 1..n-1, a = 1..n-b
    int offset = 0;
    for (int bb = 1; bb < b; ++bb) offset += n - bb;
    return interior_base() + j * per_sector() + offset + (a - 1);
  }
  int node(int j, int a, int b) const {
    if (a == 0 && b == 0) return center;
    if (b == 0) return spoke_id(j, a);
    if (a == 0) return spoke_id(j + 1, b);
    return interior_id(j, a, b);
  }
  int total() const { return interior_base() + sectors * per_sector(); }
};

}  // namespace

double Mesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * cross(node_position[tr[1]] - node_position[tr[0]], node_position[tr[2]] - node_position[tr[0]]);
}

int Mesh::euler_characteristic() const {
  std::set<std::pair<int, int>> es;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto v = triangle_vertices(t);
    for (int k = 0; k < 3; ++k) {
      const int a = v[k], b = v[(k + 1) % 3];
      es.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return num_vertices() - static_cast<int>(es.size()) + num_triangles();
}

double Mesh::cone_angle_sum() const {
  double total = 0.0;
  for (const auto& tr : triangles) {
    for (int k = 0; k < 3; ++k) {
      if (node_vertex[tr[k]] != cone_vertex) continue;
      total += angle_at(node_position[tr[k]], node_position[tr[(k + 1) % 3]], node_position[tr[(k + 2) % 3]]);
    }
  }
  return total;
}

double Mesh::shortest_edge_at(int vertex) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& nb : neighbors[vertex]) m = std::min(m, std::abs(nb.offset));
  return m;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& tr : triangles)
    for (int k = 0; k < 3; ++k) m = std::max(m, std::abs(node_position[tr[k]] - node_position[tr[(k + 1) % 3]]));
  return m;
}

double Mesh::min_cotan_weight() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : edges) m = std::min(m, e.weight);
  return m;
}

double Mesh::distance_to_cone(Complex p, Complex* offset) const {
  double best = std::numeric_limits<double>::infinity();
  Complex best_off;
  for (const Complex& c : cone_copies) {
    const double d = std::abs(p - c);
    if (d < best) {
      best = d;
      best_off = p - c;
    }
  }
  if (offset) *offset = best_off;
  return best;
}

void Mesh::build_locator() {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Complex& p : node_position) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(num_triangles()) / 2.0)));
  grid_cell_ = std::max(xmax - xmin, ymax - ymin) / target * (1.0 + 1e-9);
  grid_origin_ = {xmin, ymin};
  grid_nx_ = static_cast<int>((xmax - xmin) / grid_cell_) + 1;
  grid_ny_ = static_cast<int>((ymax - ymin) / grid_cell_) + 1;
  buckets_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  for (int t = 0; t < num_triangles(); ++t) {
    double tx0 = 1e300, tx1 = -1e300, ty0 = 1e300, ty1 = -1e300;
    for (int k = 0; k < 3; ++k) {
      const Complex p = node_position[triangles[t][k]] - grid_origin_;
      tx0 = std::min(tx0, p.real());
      tx1 = std::max(tx1, p.real());
      ty0 = std::min(ty0, p.imag());
      ty1 = std::max(ty1, p.imag());
    }
    const int i0 = std::clamp(static_cast<int>(tx0 / grid_cell_), 0, grid_nx_ - 1);
    const int i1 = std::clamp(static_cast<int>(tx1 / grid_cell_), 0, grid_nx_ - 1);
    const int j0 = std::clamp(static_cast<int>(ty0 / grid_cell_), 0, grid_ny_ - 1);
    const int j1 = std::clamp(static_cast<int>(ty1 / grid_cell_), 0, grid_ny_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(j) * grid_nx_ + i].push_back(t);
  }
}

std::optional<int> Mesh::locate(Complex p, std::array<double, 3>* bary) const {
  if (buckets_.empty()) return std::nullopt;
  const Complex q = p - grid_origin_;
  const int i = static_cast<int>(std::floor(q.real() / grid_cell_));
  const int j = static_cast<int>(std::floor(q.imag() / grid_cell_));
  if (i < 0 || j < 0 || i >= grid_nx_ || j >= grid_ny_) return std::nullopt;
  std::optional<int> best;
  double best_min = -1e300;
  std::array<double, 3> best_b{};
  for (int t : buckets_[static_cast<std::size_t>(j) * grid_nx_ + i]) {
    const auto& tr = triangles[t];
    const Complex a = node_position[tr[0]], b = node_position[tr[1]], c = node_position[tr[2]];
    const double area2 = cross(b - a, c - a);
    const std::array<double, 3> l{cross(b - p, c - p) / area2, cross(c - p, a - p) / area2,
                                  cross(a - p, b - p) / area2};
    const double mn = std::min({l[0], l[1], l[2]});
    if (mn > best_min) {
      best_min = mn;
      best = t;
      best_b = l;
    }
    if (mn >= 0.0) break;
  }
  if (!best || best_min < -1e-9) return std::nullopt;
  if (bary) *bary = best_b;
  return best;
}

Mesh triangulate(const TranslationSurface& surface, double target_edge_length, double cone_grading) {
  if (!(target_edge_length > 0.0) || target_edge_length >= surface.shortest_edge())
    throw PreconditionError("target_edge_length must be positive and below the shortest polygon edge");
  if (!(cone_grading > 0.0 && cone_grading <= 1.0)) throw PreconditionError("cone_grading must lie in (0, 1]");

  const int sectors = surface.num_edges();
  Complex center{};
  for (const Complex& p : surface.polygon_vertices) center += p;
  center /= static_cast<double>(sectors);

  double longest = 0.0;
  for (int j = 0; j < sectors; ++j) {
    longest = std::max(longest, std::abs(surface.polygon_vertices[j] - center));
    longest = std::max(longest, surface.edge_length(j));
  }
  const int n = std::max(2, static_cast<int>(std::ceil(longest / target_edge_length - 1e-9)));

  const FanIndexer ix{sectors, n};
  Mesh mesh;
  mesh.node_position.assign(ix.total(), Complex{});
  for (int j = 0; j < sectors; ++j) {
    const Complex A = surface.polygon_vertices[j] - center;
    const Complex B = surface.polygon_vertices[(j + 1) % sectors] - center;
    for (int b = 0; b <= n; ++b) {
      for (int a = 0; a + b <= n; ++a) {
        mesh.node_position[ix.node(j, a, b)] = center + (static_cast<double>(a) * A + static_cast<double>(b) * B) / static_cast<double>(n);
      }
    }
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a + b < n; ++a) {
        mesh.triangles.push_back({ix.node(j, a, b), ix.node(j, a + 1, b), ix.node(j, a, b + 1)});
        if (a + b + 1 < n) mesh.triangles.push_back({ix.node(j, a + 1, b), ix.node(j, a + 1, b + 1), ix.node(j, a, b + 1)});
      }
    }
  }
  // Snap polygon corners and edge nodes exactly onto the polygon.
  auto edge_node = [&](int e, int b) { return ix.node(e, n - b, b); };
  for (int e = 0; e < sectors; ++e) {
    for (int b = 0; b <= n; ++b) {
      const double s = static_cast<double>(b) / n;
      mesh.node_position[edge_node(e, b)] = surface.edge_start(e) + s * (surface.edge_end(e) - surface.edge_start(e));
    }
  }

  // Glue nodes on paired edges: param s on edge e <-> param 1 - s on its partner.
  std::vector<int> parent(ix.total());
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& p : surface.edge_pairings) {
    for (int b = 0; b <= n; ++b) {
      const int x = find_root(parent, edge_node(p.edge_a, b));
      const int y = find_root(parent, edge_node(p.edge_b, n - b));
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
  }

  // Radial grading toward each polygon corner.
  mesh.cone_copies = surface.polygon_vertices;
  const double grading_radius = 0.4 * surface.shortest_edge();
  const double exponent = 1.0 / cone_grading;
  if (exponent > 1.0) {
    for (Complex& x : mesh.node_position) {
      Complex off;
      const double d = mesh.distance_to_cone(x, &off);
      if (d <= 0.0 || d >= grading_radius) continue;
      const double s = d / grading_radius;
      x = (x - off) + off * (grading_profile(s, exponent) / s);
    }
  }

  // Vertex ids in order of first node appearance.
  mesh.node_vertex.assign(ix.total(), -1);
  std::map<int, int> root_to_vertex;
  for (int node = 0; node < ix.total(); ++node) {
    const int r = find_root(parent, node);
    auto it = root_to_vertex.find(r);
    if (it == root_to_vertex.end()) {
      it = root_to_vertex.emplace(r, static_cast<int>(root_to_vertex.size())).first;
      mesh.vertex_position.push_back(mesh.node_position[node]);
    }
    mesh.node_vertex[node] = it->second;
  }
  mesh.cone_vertex = mesh.node_vertex[ix.spoke_id(0, n)];

  // Glued nodes must differ by exactly one of the pairing translations.
  for (const auto& p : surface.edge_pairings) {
    for (int b = 1; b < n; ++b) {
      const Complex d = mesh.node_position[edge_node(p.edge_a, b)] - mesh.node_position[edge_node(p.edge_b, n - b)];
      if (std::abs(d - p.translation) > 1e-10 * longest) throw MeshError("glued edge nodes are not related by the pairing translation");
    }
  }

  // Delaunay flips on edges interior to the polygon.
  {
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    auto rebuild = [&]() {
      edge_tris.clear();
      for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int k = 0; k < 3; ++k) {
          const int a = mesh.triangles[t][k], b = mesh.triangles[t][(k + 1) % 3];
          edge_tris[{std::min(a, b), std::max(a, b)}].push_back(t);
        }
    };
    rebuild();
    bool changed = true;
    int guard = 0;
    while (changed) {
      changed = false;
      if (++guard > 10000) throw MeshError("Delaunay flipping did not terminate");
      for (const auto& [key, tris] : edge_tris) {
        if (tris.size() != 2) continue;
        const auto& t0 = mesh.triangles[tris[0]];
        const auto& t1 = mesh.triangles[tris[1]];
        auto opposite = [&](const std::array<int, 3>& t) {
          for (int k = 0; k < 3; ++k)
            if (t[k] != key.first && t[k] != key.second) return t[k];
          return -1;
        };
        const int o0 = opposite(t0), o1 = opposite(t1);
        const auto& P = mesh.node_position;
        const double sum = angle_at(P[o0], P[key.first], P[key.second]) + angle_at(P[o1], P[key.first], P[key.second]);
        if (sum <= kPi + 1e-12) continue;
        // Replace (a, b) by (o0, o1); keep counter-clockwise orientation.
        std::array<int, 3> n0{o0, o1, key.first}, n1{o1, o0, key.second};
        if (cross(P[n0[1]] - P[n0[0]], P[n0[2]] - P[n0[0]]) < 0) std::swap(n0[1], n0[2]);
        if (cross(P[n1[1]] - P[n1[0]], P[n1[2]] - P[n1[0]]) < 0) std::swap(n1[1], n1[2]);
        if (std::abs(cross(P[n0[1]] - P[n0[0]], P[n0[2]] - P[n0[0]])) < 1e-300 ||
            std::abs(cross(P[n1[1]] - P[n1[0]], P[n1[2]] - P[n1[0]])) < 1e-300)
          throw MeshError("degenerate configuration during Delaunay flip");
        mesh.triangles[tris[0]] = n0;
        mesh.triangles[tris[1]] = n1;
        ++mesh.flips;
        changed = true;
        break;
      }
      if (changed) rebuild();
    }
  }

  const int nv = mesh.num_vertices();
  mesh.vertex_area.assign(nv, 0.0);
  std::map<std::pair<int, int>, double> weights;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0)) throw MeshError("inverted or degenerate triangle");
    const auto& P = mesh.node_position;
    int obtuse = -1;
    for (int k = 0; k < 3; ++k)
      if (dot(P[tr[(k + 1) % 3]] - P[tr[k]], P[tr[(k + 2) % 3]] - P[tr[k]]) < 0.0) obtuse = k;
    for (int k = 0; k < 3; ++k) {
      const int a = tr[k], b = tr[(k + 1) % 3], c = tr[(k + 2) % 3];
      // Mixed Voronoi area.
      double share;
      if (obtuse < 0) {
        share = (std::norm(P[b] - P[a]) * cot_at(P[c], P[a], P[b]) + std::norm(P[c] - P[a]) * cot_at(P[b], P[a], P[c])) / 8.0;
      } else {
        share = obtuse == k ? area / 2.0 : area / 4.0;
      }
      mesh.vertex_area[mesh.node_vertex[a]] += share;
      const int va = mesh.node_vertex[a], vb = mesh.node_vertex[b];
      if (va == vb) throw MeshError("edge joins a vertex to itself; refine the mesh");
      const double w = 0.5 * cot_at(mesh.node_position[c], mesh.node_position[a], mesh.node_position[b]);
      weights[{std::min(va, vb), std::max(va, vb)}] += w;
    }
  }
  for (const auto& [key, w] : weights) {
    if (w < -1e-12) throw MeshError("negative cotangent weight on a glued edge survives Delaunay flipping");
    mesh.edges.push_back({key.first, key.second, std::max(w, 0.0)});
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * mesh.edges.size());
  std::vector<double> diag(nv, 0.0);
  for (const auto& e : mesh.edges) {
    trip.emplace_back(e.i, e.j, e.weight);
    trip.emplace_back(e.j, e.i, e.weight);
    diag[e.i] -= e.weight;
    diag[e.j] -= e.weight;
  }
  for (int i = 0; i < nv; ++i) trip.emplace_back(i, i, diag[i]);
  mesh.stiffness.resize(nv, nv);
  mesh.stiffness.setFromTriplets(trip.begin(), trip.end());

  // Neighbour offsets and cone distances.
  mesh.neighbors.assign(nv, {});
  const double tol = 1e-9 * longest;
  for (const auto& tr : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) {
        if (k == l) continue;
        const int va = mesh.node_vertex[tr[k]], vb = mesh.node_vertex[tr[l]];
        const Complex off = mesh.node_position[tr[l]] - mesh.node_position[tr[k]];
        auto& list = mesh.neighbors[va];
        const bool dup = std::any_of(list.begin(), list.end(), [&](const Mesh::Neighbor& nb) {
          return nb.vertex == vb && std::abs(nb.offset - off) < tol;
        });
        if (!dup) list.push_back({vb, off});
      }
    }
  }
  mesh.cone_distance.assign(nv, std::numeric_limits<double>::infinity());
  mesh.cone_offset.assign(nv, Complex{});
  for (int node = 0; node < mesh.num_nodes(); ++node) {
    const int v = mesh.node_vertex[node];
    Complex off;
    const double d = mesh.distance_to_cone(mesh.node_position[node], &off);
    if (d < mesh.cone_distance[v]) {
      mesh.cone_distance[v] = d;
      mesh.cone_offset[v] = off;
    }
  }
  mesh.cone_distance[mesh.cone_vertex] = 0.0;
  mesh.cone_offset[mesh.cone_vertex] = 0.0;

  mesh.polygon_area = surface.area();
  mesh.build_locator();
  return mesh;
}

RealField laplacian_apply(const Mesh& mesh, const RealField& f) {
  if (static_cast<int>(f.size()) != mesh.num_vertices()) throw PreconditionError("field size does not match mesh");
  RealField out(f.size(), 0.0);
  for (const auto& e : mesh.edges) {
    const double flux = e.weight * (f[e.j] - f[e.i]);
    out[e.i] += flux;
    out[e.j] -= flux;
  }
  for (std::size_t i = 0; i < f.size(); ++i) out[i] /= mesh.vertex_area[i];
  return out;
}

double integrate(const Mesh& mesh, const RealField& f) {
  if (static_cast<int>(f.size()) != mesh.num_vertices()) throw PreconditionError("field size does not match mesh");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * mesh.vertex_area[i];
  return s;
}

bool fit_jet(const Mesh& mesh, const RealField& field, int vertex, int degree, LocalJet& jet) {
  if (vertex == mesh.cone_vertex || degree < 1 || degree > 3) return false;
  // Gather the 2-ring with flat offsets; the cone vertex is never used.
  std::vector<std::pair<int, Complex>> pts;
  std::vector<char> used(mesh.num_vertices(), 0);
  used[vertex] = 1;
  for (const auto& nb : mesh.neighbors[vertex]) {
    if (nb.vertex == mesh.cone_vertex) return false;
    if (!used[nb.vertex]) {
      used[nb.vertex] = 1;
      pts.emplace_back(nb.vertex, nb.offset);
    }
  }
  const std::size_t ring1 = pts.size();
  for (std::size_t r = 0; r < ring1; ++r) {
    const auto [j, dj] = pts[r];
    for (const auto& nb : mesh.neighbors[j]) {
      if (nb.vertex == mesh.cone_vertex || used[nb.vertex]) continue;
      used[nb.vertex] = 1;
      pts.emplace_back(nb.vertex, dj + nb.offset);
    }
  }
  const int nterms = degree == 1 ? 2 : degree == 2 ? 5 : 9;
  if (static_cast<int>(pts.size()) < nterms + 2) return false;
  double h = 0.0;
  for (const auto& p : pts) h = std::max(h, std::abs(p.second));
  Eigen::MatrixXd A(pts.size(), nterms);
  Eigen::VectorXd rhs(pts.size());
  for (std::size_t r = 0; r < pts.size(); ++r) {
    const double x = pts[r].second.real() / h, y = pts[r].second.imag() / h;
    const double row[9] = {x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y};
    for (int c = 0; c < nterms; ++c) A(r, c) = row[c];
    rhs(r) = field[pts[r].first] - field[vertex];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < nterms) return false;
  const Eigen::VectorXd c = qr.solve(rhs);
  jet.value = field[vertex];
  jet.dx = c(0) / h;
  jet.dy = c(1) / h;
  jet.laplacian = degree >= 2 ? 2.0 * (c(2) + c(4)) / (h * h) : 0.0;
  return true;
}

void write_mesh_vertices_csv(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  out << "vertex_id,x,y,class_id,area,cone_distance\n";
  for (int node = 0; node < mesh.num_nodes(); ++node) {
    const int v = mesh.node_vertex[node];
    out << node << ',' << mesh.node_position[node].real() << ',' << mesh.node_position[node].imag() << ',' << v << ','
        << mesh.vertex_area[v] << ',' << mesh.cone_distance[v] << '\n';
  }
}

void write_mesh_triangles_csv(std::ostream& out, const Mesh& mesh) {
  out << "triangle_id,n0,n1,n2,v0,v1,v2\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    const auto v = mesh.triangle_vertices(t);
    out << t << ',' << tr[0] << ',' << tr[1] << ',' << tr[2] << ',' << v[0] << ',' << v[1] << ',' << v[2] << '\n';
  }
}

}  // namespace higgslab
