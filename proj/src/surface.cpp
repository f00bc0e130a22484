#include "higgslab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

namespace higgslab {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

double interior_angle(const TranslationSurface& s, int corner) {
  const int n = s.num_edges();
  const Complex here = s.polygon_vertices[corner];
  const Complex next = s.polygon_vertices[(corner + 1) % n];
  const Complex prev = s.polygon_vertices[(corner + n - 1) % n];
  // Angle swept counter-clockwise from (next - here) to (prev - here).
  double a = std::arg((prev - here) / (next - here));
  if (a <= 0.0) a += 2.0 * kPi;
  return a;
}

}  // namespace

double TranslationSurface::shortest_edge() const {
  double m = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_edges(); ++e) m = std::min(m, edge_length(e));
  return m;
}

int TranslationSurface::partner(int e) const {
  for (const auto& p : edge_pairings) {
    if (p.edge_a == e) return p.edge_b;
    if (p.edge_b == e) return p.edge_a;
  }
  throw PreconditionError("edge " + std::to_string(e) + " is not paired");
}

Complex TranslationSurface::translation_onto(int e) const {
  for (const auto& p : edge_pairings) {
    if (p.edge_a == e) return p.translation;
    if (p.edge_b == e) return -p.translation;
  }
  throw PreconditionError("edge " + std::to_string(e) + " is not paired");
}

double TranslationSurface::area() const {
  double twice = 0.0;
  const int n = num_edges();
  for (int i = 0; i < n; ++i) {
    const Complex a = polygon_vertices[i];
    const Complex b = polygon_vertices[(i + 1) % n];
    twice += a.real() * b.imag() - b.real() * a.imag();
  }
  return 0.5 * twice;
}

double TranslationSurface::gauss_bonnet_defect() const {
  double total = 0.0;
  for (const auto& c : cone_points) total += 2.0 * kPi - c.angle;
  return total;
}

void finalize_surface(TranslationSurface& s) {
  const int n = s.num_edges();
  if (n < 4 || n % 2 != 0) throw PreconditionError("polygon needs an even number (>= 4) of edges");
  if (s.area() <= 0.0) throw PreconditionError("polygon must be counter-clockwise with positive area");

  std::vector<int> seen(n, 0);
  for (auto& p : s.edge_pairings) {
    if (p.edge_a < 0 || p.edge_a >= n || p.edge_b < 0 || p.edge_b >= n || p.edge_a == p.edge_b)
      throw PreconditionError("edge pairing out of range or self-paired");
    ++seen[p.edge_a];
    ++seen[p.edge_b];
    const Complex da = s.edge_end(p.edge_a) - s.edge_start(p.edge_a);
    const Complex db = s.edge_end(p.edge_b) - s.edge_start(p.edge_b);
    const double scale = std::abs(da);
    if (std::abs(da + db) > 1e-12 * scale)
      throw PreconditionError("paired edges must be parallel, equal length and oppositely oriented");
    p.translation = s.edge_start(p.edge_a) - s.edge_end(p.edge_b);
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
    throw PreconditionError("edge pairing must be a fixed-point-free involution");

  // Start of edge a is glued to end of edge b and vice versa.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto unite = [&](int x, int y) { parent[find_root(parent, x)] = find_root(parent, y); };
  for (const auto& p : s.edge_pairings) {
    unite(p.edge_a, (p.edge_b + 1) % n);
    unite((p.edge_a + 1) % n, p.edge_b);
  }
  std::vector<int> root_to_class(n, -1);
  s.corner_class.assign(n, -1);
  int classes = 0;
  for (int c = 0; c < n; ++c) {
    const int r = find_root(parent, c);
    if (root_to_class[r] < 0) root_to_class[r] = classes++;
    s.corner_class[c] = root_to_class[r];
  }

  std::vector<double> angle(classes, 0.0);
  for (int c = 0; c < n; ++c) angle[s.corner_class[c]] += interior_angle(s, c);
  s.cone_points.clear();
  for (int k = 0; k < classes; ++k) {
    if (std::abs(angle[k] - 2.0 * kPi) > 1e-9) s.cone_points.push_back({k, angle[k]});
  }
  // Euler characteristic of the glued cell complex: V - E + F.
  const int chi = classes - n / 2 + 1;
  if (chi % 2 != 0) throw PreconditionError("glued polygon is not orientable");
  s.genus = (2 - chi) / 2;
}

TranslationSurface build_octagon_surface(double circumradius) {
  if (!(circumradius > 0.0)) throw PreconditionError("circumradius must be positive");
  TranslationSurface s;
  for (int j = 0; j < 8; ++j)
    s.polygon_vertices.push_back(std::polar(circumradius, kPi / 8.0 + j * kPi / 4.0));
  for (int j = 0; j < 4; ++j) s.edge_pairings.push_back({j, j + 4, Complex{}});
  finalize_surface(s);
  return s;
}

void write_surface_config(std::ostream& out, const TranslationSurface& s) {
  out << std::setprecision(17);
  out << "[surface]\n";
  out << "vertices = [";
  for (int i = 0; i < s.num_edges(); ++i) {
    if (i) out << ", ";
    out << "[" << s.polygon_vertices[i].real() << ", " << s.polygon_vertices[i].imag() << "]";
  }
  out << "]\n";
  out << "pairings = [";
  for (std::size_t i = 0; i < s.edge_pairings.size(); ++i) {
    if (i) out << ", ";
    out << "[" << s.edge_pairings[i].edge_a << ", " << s.edge_pairings[i].edge_b << "]";
  }
  out << "]\n";
}

TranslationSurface read_surface_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw PreconditionError(std::string("surface config: ") + e.what());
  }
  TranslationSurface s;
  try {
    const auto verts = nlohmann::json::parse(tree.get<std::string>("surface.vertices"));
    for (const auto& v : verts) s.polygon_vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    const auto pairs = nlohmann::json::parse(tree.get<std::string>("surface.pairings"));
    for (const auto& p : pairs) s.edge_pairings.push_back({p.at(0).get<int>(), p.at(1).get<int>(), Complex{}});
  } catch (const std::exception& e) {
    throw PreconditionError(std::string("surface config: ") + e.what());
  }
  finalize_surface(s);
  return s;
}

}  // namespace higgslab
