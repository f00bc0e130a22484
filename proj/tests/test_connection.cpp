#include <cmath>

#include "doctest.h"
#include "higgslab/connection.hpp"

using namespace higgslab;

namespace {

struct Fixture {
  TranslationSurface surface = build_octagon_surface(1.0);
  Mesh mesh = triangulate(surface, 0.1, 0.75);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

ConnectionField zero_degree_connection(Complex k, Complex c, Parameters p) {
  const HiggsData d = HiggsData::zero_degree(k, c);
  const VortexSolution s = solve_vortex(fx().mesh, d, p.R);
  return assemble_connection(fx().mesh, d, p, s.field);
}

Mat2 inv(const Mat2& m) {
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r / m.determinant();
}

}  // namespace

TEST_CASE("degree-zero connection matrices are constant") {
  const double R = 0.7;
  const Complex k(4.0, 0.0);
  const ConnectionField conn = zero_degree_connection(k, 1.0, {1.0, R});
  Mat2 M, N;
  M << 0.0, k, 1.0, 0.0;
  N << 0.0, R * R * std::abs(k), R * R * std::conj(k) / std::abs(k), 0.0;
  for (int i = 0; i < fx().mesh.num_vertices(); ++i) {
    CHECK((conn.M[i] - M).norm() < 1e-12);
    CHECK((conn.N[i] - N).norm() < 1e-12);
    // MN = NM = R^2 |k| Id, so [M, N] = 0.
    CHECK((conn.M[i] * conn.N[i] - R * R * std::abs(k) * Mat2::Identity()).norm() < 1e-12);
    CHECK((conn.M[i] * conn.N[i] - conn.N[i] * conn.M[i]).norm() < 1e-12);
  }
  CHECK(sup_norm(curvature_residual(conn, fx().mesh).face_norm) <= 1e-13);
}

TEST_CASE("Hitchin alpha = 0 frame entries") {
  const HiggsData d = HiggsData::hitchin({});
  const VortexSolution s = solve_vortex(fx().mesh, d, 1.0);
  const ConnectionField conn = assemble_connection(fx().mesh, d, {1.0, 1.0}, s.field);
  for (int i = 0; i < fx().mesh.num_vertices(); ++i) {
    CHECK(conn.M[i](0, 1) == Complex{});
    CHECK(conn.M[i](1, 0) == Complex(1.0, 0.0));
    CHECK(conn.N[i](1, 0) == Complex{});
  }
}

TEST_CASE("curvature flags an unsolved field") {
  const HiggsData d = HiggsData::hitchin(1.0);
  const VortexSolution s = solve_vortex(fx().mesh, d, 1.0);
  const ConnectionField solved = assemble_connection(fx().mesh, d, {1.0, 1.0}, s.field);
  // Background only: psi = 0.
  const MetricField zero = make_metric_field(fx().mesh, s.field.singular_coefficient, s.field.cutoff_radius);
  // With c = 1 the background is already a solution away from the cone, so perturb c.
  const ConnectionField unsolved = assemble_connection(fx().mesh, HiggsData::hitchin(2.0), {1.0, 1.0}, zero);
  const double a = sup_outside(fx().mesh, curvature_residual(solved, fx().mesh).face_norm, 0.36);
  const double b = sup_outside(fx().mesh, curvature_residual(unsolved, fx().mesh).face_norm, 0.36);
  CHECK(a < 0.05);
  CHECK(b > 0.5);
}

TEST_CASE("segment exponential") {
  Mat2 A;
  A << Complex(0.3, 0.1), Complex(1.2, -0.4), Complex(-0.7, 0.2), Complex(-0.3, -0.1);
  // Series oracle.
  Mat2 term = Mat2::Identity(), sum = Mat2::Identity();
  for (int n = 1; n < 40; ++n) {
    term = term * A / static_cast<double>(n);
    sum += term;
  }
  CHECK((expm_traceless(A) - sum).norm() < 1e-13);
  CHECK(std::abs(expm_traceless(A).determinant() - 1.0) < 1e-13);
  CHECK((expm_traceless(Mat2::Zero()) - Mat2::Identity()).norm() == 0.0);
}

TEST_CASE("developed chord crosses one pair") {
  const auto chords = generator_chords(fx().surface, {});
  REQUIRE(chords.size() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(chords[j].crossings.size() == 1);
    CHECK(chords[j].clearance == doctest::Approx(std::sin(kPi / 8.0)).epsilon(1e-12));
    Complex disp = 0.0;
    for (const auto& [a, b] : chords[j].pieces) disp += b - a;
    CHECK(std::abs(disp - fx().surface.translation_onto(j)) < 1e-12);
  }
}

TEST_CASE("single generator loop, flat degree-zero connection") {
  const ConnectionField conn = zero_degree_connection(1.0, 1.0, {1.0, 0.0});
  const Path p = developed_path(fx().surface, {}, {fx().surface.translation_onto(0)});
  const TransportResult r = transport(conn, p, fx().mesh);
  const Complex v = fx().surface.translation_onto(0);
  Mat2 X;
  X << 0.0, v, v, 0.0;
  CHECK((r.value - expm_traceless(X)).norm() < 1e-12);
  CHECK(std::abs(r.value.trace() - 2.0 * std::cosh(v)) < 1e-12);
}

TEST_CASE("contractible loops in one chart give the identity") {
  const ConnectionField conn = zero_degree_connection(2.0, 1.0, {1.0, 0.6});
  const Complex start(0.1, -0.2);
  const Path tri = developed_path(fx().surface, start, {Complex(0.3, 0.1), Complex(-0.1, 0.3), Complex(-0.2, -0.4)});
  CHECK((transport(conn, tri, fx().mesh).value - Mat2::Identity()).norm() < 1e-12);
  // Shrunken octagon boundary: the edge word in one chart.
  std::vector<Complex> edges;
  for (int e = 0; e < 8; ++e) edges.push_back(0.9 * (fx().surface.edge_end(e) - fx().surface.edge_start(e)));
  const Path boundary = developed_path(fx().surface, 0.9 * fx().surface.polygon_vertices[0], edges);
  CHECK(boundary.crossings.empty());
  CHECK((transport(conn, boundary, fx().mesh).value - Mat2::Identity()).norm() < 1e-10);
}

TEST_CASE("degree-zero surface-group relation") {
  const ConnectionField conn = zero_degree_connection(4.0, 1.0, {1.0, 0.5});
  const HolonomyReport h = holonomy_generators(conn, fx().surface, fx().mesh);
  CHECK(h.relation_defect <= 1e-8);
  CHECK(h.max_det_drift <= 1e-9);
  for (const Mat2& g : h.generators) CHECK(std::abs(g.determinant() - 1.0) < 1e-12);
  // The relator is the chord word x1 x2 x3 x4 x1^-1 x2^-1 x3^-1 x4^-1.
  const auto& c = h.chords;
  const Mat2 w = c[0] * inv(c[1]) * c[2] * inv(c[3]) * inv(c[0]) * c[1] * inv(c[2]) * c[3];
  CHECK((w - Mat2::Identity()).norm() < 1e-8);
}

TEST_CASE("traces do not depend on the basepoint") {
  const ConnectionField conn = zero_degree_connection(4.0, 1.0, {1.0, 0.5});
  const HolonomyReport a = holonomy_generators(conn, fx().surface, fx().mesh, {}, {});
  const HolonomyReport b = holonomy_generators(conn, fx().surface, fx().mesh, {}, Complex(0.05, -0.03));
  for (int g = 0; g < 4; ++g) CHECK(std::abs(a.traces[g] - b.traces[g]) <= 1e-8 * std::max(1.0, std::abs(a.traces[g])));
}

TEST_CASE("homotopic paths agree for a flat connection") {
  const ConnectionField conn = zero_degree_connection(1.0, 1.0, {1.0, 0.5});
  const Complex v = fx().surface.translation_onto(1);
  const Path straight = developed_path(fx().surface, {}, {v});
  const Path bent = developed_path(fx().surface, {}, {0.5 * v + Complex(0.0, 0.05), 0.5 * v - Complex(0.0, 0.05)});
  REQUIRE(bent.crossings.size() == straight.crossings.size());
  CHECK((transport(conn, straight, fx().mesh).value - transport(conn, bent, fx().mesh).value).norm() < 1e-10);
}

TEST_CASE("paths into the guard disk are rejected") {
  const ConnectionField conn = zero_degree_connection(1.0, 1.0, {1.0, 0.5});
  const Path p = developed_path(fx().surface, {}, {fx().surface.polygon_vertices[0] * 0.95});
  CHECK_THROWS_AS(transport(conn, p, fx().mesh, {1e-10, 0.36}), PathError);
}

TEST_CASE("Hitchin holonomy on the reality locus") {
  const HiggsData d = HiggsData::hitchin(1.0);
  const VortexSolution s = solve_vortex(fx().mesh, d, 1.0);
  const ConnectionField conn = assemble_connection(fx().mesh, d, {1.0, 1.0}, s.field);
  const HolonomyReport h = holonomy_generators(conn, fx().surface, fx().mesh, {1e-10, 0.36});
  CHECK(h.max_det_drift <= 1e-9);
  for (const Complex& t : h.traces) CHECK(std::abs(t.imag()) <= 1e-8);
  // Hyperbolic generators.
  for (const Complex& t : h.traces) CHECK(std::abs(t.real()) > 2.0);
}

TEST_CASE("degree-zero conformal limit") {
  const HiggsData d = HiggsData::zero_degree(4.0, 1.0);
  const Complex hbar(0.8, 0.3);
  const ConformalLimitResult lim = conformal_limit(fx().mesh, d, hbar, {0.5, 0.25, 0.125});
  for (int i = 0; i < fx().mesh.num_vertices(); ++i) {
    CHECK(std::abs(lim.limit.M[i](0, 1) - 4.0 / hbar) < 1e-12);
    CHECK(std::abs(lim.limit.M[i](1, 0) - 1.0 / hbar) < 1e-12);
    CHECK(lim.limit.N[i].norm() == 0.0);
  }
  CHECK(lim.independent_defect < 1e-12);
  CHECK(lim.monotone);
  CHECK(lim.slope == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("Hitchin conformal limit") {
  const HiggsData d = HiggsData::hitchin(1.0);
  const ConformalLimitResult lim = conformal_limit(fx().mesh, d, 1.0, {1.0, 0.5, 0.25, 0.125, 0.0625}, {}, 0.36);
  // h depends on R through R^2 alpha, which bends the fit at R ~ 1; the asymptotic rate is 4.
  const auto& t = lim.table;
  const double tail = std::log(t[4].lower_left_dzbar / t[3].lower_left_dzbar) / std::log(0.5);
  CHECK(std::abs(tail - 4.0) <= 0.01);
  CHECK(lim.slope < tail);
  CHECK(lim.independent_defect <= 1e-9);
  CHECK(lim.transversality == 0.0);
  CHECK(lim.monotone);
  for (std::size_t i = 1; i < lim.table.size(); ++i) CHECK(lim.table[i].distance < lim.table[i - 1].distance);
}

TEST_CASE("slope fit") {
  CHECK(loglog_slope({1.0, 2.0, 4.0}, {3.0, 48.0, 768.0}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), PreconditionError);
}
