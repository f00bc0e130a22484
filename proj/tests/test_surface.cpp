#include <cmath>
#include <sstream>

#include "doctest.h"
#include "higgslab/mesh.hpp"
#include "higgslab/surface.hpp"

using namespace higgslab;

TEST_CASE("octagon surface data") {
  const TranslationSurface s = build_octagon_surface(1.0);
  CHECK(s.num_edges() == 8);
  CHECK(s.genus == 2);
  REQUIRE(s.cone_points.size() == 1);
  CHECK(s.cone_points[0].angle == doctest::Approx(6.0 * kPi));
  CHECK(s.gauss_bonnet_defect() == doctest::Approx(-4.0 * kPi));
  CHECK(s.area() == doctest::Approx(2.0 * std::sqrt(2.0)));
  for (int e = 0; e < 8; ++e) {
    CHECK(s.partner(e) == (e + 4) % 8);
    // The partner's start is carried to this edge's end (orientation reverses).
    const int p = s.partner(e);
    CHECK(std::abs(s.edge_start(p) + s.translation_onto(e) - s.edge_end(e)) < 1e-14);
    CHECK(std::abs(s.translation_onto(e) + s.translation_onto(p)) < 1e-14);
  }
}

TEST_CASE("surface config round trip") {
  const TranslationSurface s = build_octagon_surface(1.5);
  std::stringstream io;
  write_surface_config(io, s);
  const TranslationSurface r = read_surface_config(io);
  REQUIRE(r.num_edges() == 8);
  for (int e = 0; e < 8; ++e) CHECK(std::abs(r.polygon_vertices[e] - s.polygon_vertices[e]) < 1e-15);
  CHECK(r.genus == 2);
}

TEST_CASE("malformed surface config is rejected") {
  std::stringstream io("[surface]\nvertices = [[0, 0], [1, 0], [1, 1], [0, 1]]\npairings = [[0, 1]]\n");
  CHECK_THROWS_AS(read_surface_config(io), PreconditionError);
}

TEST_CASE("mesh topology and geometry") {
  const TranslationSurface s = build_octagon_surface(1.0);
  for (double t : {0.2, 0.1}) {
    const Mesh m = triangulate(s, t, 0.75);
    CHECK(m.euler_characteristic() == -2);
    CHECK(m.cone_angle_sum() == doctest::Approx(6.0 * kPi).epsilon(1e-12));
    double area = 0.0;
    for (double a : m.vertex_area) area += a;
    CHECK(area == doctest::Approx(s.area()).epsilon(1e-12));
    CHECK(m.min_cotan_weight() >= -1e-12);
    CHECK(m.cone_distance[m.cone_vertex] == 0.0);
  }
}

TEST_CASE("fan counts") {
  const TranslationSurface s = build_octagon_surface(1.0);
  const Mesh m = triangulate(s, 0.2, 1.0);
  // n subdivisions per fan edge: V = 4 n^2 - 2, F = 8 n^2.
  const int n = static_cast<int>(std::round(std::sqrt(m.num_triangles() / 8.0)));
  CHECK(m.num_triangles() == 8 * n * n);
  CHECK(m.num_vertices() == 4 * n * n - 2);
}

TEST_CASE("mesh preconditions") {
  const TranslationSurface s = build_octagon_surface(1.0);
  CHECK_THROWS_AS(triangulate(s, -0.1, 0.75), PreconditionError);
  CHECK_THROWS_AS(triangulate(s, 0.1, 0.0), PreconditionError);
  CHECK_THROWS_AS(triangulate(s, 0.1, 1.5), PreconditionError);
  // Delaunay flips repair strong grading.
  const Mesh strong = triangulate(s, 0.05, 0.3);
  CHECK(strong.num_vertices() == triangulate(s, 0.05, 0.75).num_vertices());
}

TEST_CASE("laplacian of constants and quadratics") {
  const TranslationSurface s = build_octagon_surface(1.0);
  const Mesh m = triangulate(s, 0.1, 0.75);
  const RealField one(m.num_vertices(), 1.0);
  for (double v : laplacian_apply(m, one)) CHECK(std::abs(v) < 1e-12);
  CHECK(integrate(m, one) == doctest::Approx(s.area()));

  // |z|^2 near the centre, where stencils do not cross glued edges.
  RealField q(m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) q[i] = std::norm(m.vertex_position[i]);
  const RealField lap = laplacian_apply(m, q);
  LocalJet jet;
  int tested = 0;
  for (int i = 0; i < m.num_vertices(); ++i) {
    if (std::abs(m.vertex_position[i]) > 0.5) continue;
    CHECK(lap[i] == doctest::Approx(4.0).epsilon(1e-9));
    REQUIRE(fit_jet(m, q, i, 3, jet));
    CHECK(jet.laplacian == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(std::abs(jet.dz() - std::conj(m.vertex_position[i])) < 1e-9);
    ++tested;
  }
  CHECK(tested > 10);
}

TEST_CASE("locator finds containing triangles") {
  const TranslationSurface s = build_octagon_surface(1.0);
  const Mesh m = triangulate(s, 0.1, 0.75);
  for (Complex p : {Complex(0.0, 0.0), Complex(0.3, -0.2), Complex(-0.7, 0.1)}) {
    std::array<double, 3> lam{};
    const auto t = m.locate(p, &lam);
    REQUIRE(t.has_value());
    for (double l : lam) CHECK(l >= -1e-12);
    Complex x = 0.0;
    for (int k = 0; k < 3; ++k) x += lam[k] * m.node_position[m.triangles[*t][k]];
    CHECK(std::abs(x - p) < 1e-12);
  }
  CHECK_FALSE(m.locate(Complex(2.0, 0.0)).has_value());
}

TEST_CASE("mesh csv dumps") {
  const Mesh m = triangulate(build_octagon_surface(1.0), 0.2, 0.75);
  std::stringstream v, t;
  write_mesh_vertices_csv(v, m);
  write_mesh_triangles_csv(t, m);
  std::string header;
  std::getline(v, header);
  CHECK(header.find("vertex_id") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(v, line);) ++rows;
  CHECK(rows == m.num_nodes());
}
