#include <cmath>

#include "doctest.h"
#include "higgslab/reality.hpp"

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

ConnectionField connection(const HiggsData& d, const Parameters& p) {
  const VortexSolution s = solve_vortex(fx().mesh, d, p.R);
  REQUIRE(s.report.converged);
  return assemble_connection(fx().mesh, d, p, s.field);
}

}  // namespace

TEST_CASE("real structure is an involution") {
  const ConnectionField conn = connection(HiggsData::hitchin(1.0), {1.0, 1.0});
  const RealStructure rs = make_real_structure(fx().mesh, conn.field);
  CHECK(rs.involution_defect <= 1e-12);
}

TEST_CASE("preservation on the reality locus") {
  for (double theta : {0.0, 0.4, 1.3}) {
    const Parameters p{std::polar(1.0, theta), 1.0};
    const ConnectionField conn = connection(HiggsData::hitchin(1.0), p);
    const RealityResidual r = reality_residual(conn, make_real_structure(fx().mesh, conn.field), fx().mesh, 0.36);
    CHECK(r.preservation_sup <= 1e-12);
    // Two discrete gradients of phi; they differ by truncation only.
    CHECK(r.gradient_sup < 0.2);
  }
}

TEST_CASE("negative controls off the reality locus") {
  {
    const ConnectionField conn = connection(HiggsData::hitchin(1.0), {1.0, 0.5});
    const RealityResidual r = reality_residual(conn, make_real_structure(fx().mesh, conn.field), fx().mesh);
    CHECK(r.preservation_sup > 1e-2);
  }
  {
    const ConnectionField conn = connection(HiggsData::hitchin({}), {1.0, 0.5});
    const RealityResidual r = reality_residual(conn, make_real_structure(fx().mesh, conn.field), fx().mesh);
    CHECK(r.preservation_sup > 1e-2);
  }
}

TEST_CASE("reality check on a conjugated real representation") {
  Mat2 A, B, P;
  A << 2.0, 1.0, 1.0, 1.0;
  B << 3.0, -1.0, 1.0, 0.0;
  P << Complex(1.0, 0.5), Complex(0.2, -0.3), Complex(0.1, 0.4), Complex(1.0, -0.2);
  const Mat2 Pi = P.inverse();
  const HolonomyRealityReport real = holonomy_reality_check({A, B});
  CHECK(real.word_imag < 1e-14);
  const HolonomyRealityReport conj = holonomy_reality_check({P * A * Pi, P * B * Pi});
  CHECK(conj.generator_imag < 1e-13);
  CHECK(conj.word_imag < 1e-12);
  CHECK(conj.commutation_residual < 1e-12);
  REQUIRE(conj.conjugator_found);
  CHECK(conj.conjugated_imag < 1e-10);
  // 2 generators, 4 letters: 4 + 12 + 36 reduced words.
  CHECK(conj.words.size() == 52);
}

TEST_CASE("non-real traces are detected") {
  Mat2 A, B;
  A << Complex(2.0, 0.5), 1.0, 1.0, 1.0;
  A /= std::sqrt(A.determinant());
  B << 3.0, -1.0, 1.0, 0.0;
  const HolonomyRealityReport r = holonomy_reality_check({A, B});
  CHECK(r.generator_imag > 0.1);
}

TEST_CASE("holonomy reality for the Hitchin family") {
  const ConnectionField conn = connection(HiggsData::hitchin(1.0), {1.0, 1.0});
  const HolonomyReport h = holonomy_generators(conn, fx().surface, fx().mesh, {1e-10, 0.36});
  const HolonomyRealityReport r = holonomy_reality_check(h.generators);
  CHECK(r.generator_imag <= 1e-8);
  CHECK(r.word_imag <= 1e-6);
  CHECK(min_fixed_line_angle(fx().mesh, conn.field) > 0.0);

  const ConnectionField off = connection(HiggsData::hitchin(1.0), {1.0, 0.5});
  const HolonomyReport ho = holonomy_generators(off, fx().surface, fx().mesh, {1e-10, 0.36});
  CHECK(holonomy_reality_check(ho.generators).generator_imag > 1e-3);
}

TEST_CASE("degree-zero holonomy at hbar = 1, R = 1 is real") {
  const HiggsData d = HiggsData::zero_degree(1.0, 1.0);
  const VortexSolution s = solve_vortex(fx().mesh, d, 1.0);
  const ConnectionField conn = assemble_connection(fx().mesh, d, {1.0, 1.0}, s.field);
  const HolonomyReport h = holonomy_generators(conn, fx().surface, fx().mesh);
  CHECK(holonomy_reality_check(h.generators).generator_imag <= 1e-8);
}
