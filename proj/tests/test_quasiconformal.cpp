#include <cmath>

#include "doctest.h"
#include "higgslab/quasiconformal.hpp"

using namespace higgslab;

namespace {

const Mesh& mesh() {
  static const Mesh m = triangulate(build_octagon_surface(1.0), 0.1, 0.75);
  return m;
}

MetricField solved(const HiggsData& d, double R) {
  const VortexSolution s = solve_vortex(mesh(), d, R);
  REQUIRE(s.report.converged);
  return s.field;
}

}  // namespace

TEST_CASE("degree-zero Beltrami modulus") {
  const HiggsData d = HiggsData::zero_degree(1.0, 1.0);
  const Parameters p{1.0, 0.5};
  const BeltramiField mu = beltrami(mesh(), d, p, solved(d, 0.5));
  CHECK(mu.family == Family::ZeroDegree);
  CHECK(std::abs(mu.sup_norm - 0.25) <= 1e-12);
  for (const Complex& m : mu.mu) CHECK(std::abs(std::abs(m) - 0.25) <= 1e-12);
}

TEST_CASE("Hitchin alpha = 0 gives mu = 0") {
  const HiggsData d = HiggsData::hitchin({});
  const BeltramiField mu = beltrami(mesh(), d, {1.0, 1.0}, solved(d, 1.0));
  CHECK(mu.sup_norm == 0.0);
}

TEST_CASE("Hitchin Beltrami bound") {
  for (Complex c : {Complex(0.5, 0.0), Complex(1.0, 0.0), Complex(2.0, 0.0)}) {
    const HiggsData d = HiggsData::hitchin(c);
    const BeltramiField mu = beltrami(mesh(), d, {1.0, 1.0}, solved(d, 1.0));
    CHECK(mu.sup_norm < 1.0);
    CHECK(mu.sup_norm > 0.0);
  }
}

TEST_CASE("inadmissible parameters are rejected") {
  const HiggsData d = HiggsData::zero_degree(1.0, 1.0);
  CHECK_THROWS_AS(beltrami(mesh(), d, {1.0, 1.0}, solved(d, 0.5)), PreconditionError);
}

TEST_CASE("mu depends on hbar through hbar^2") {
  const HiggsData d = HiggsData::hitchin(1.0);
  const MetricField f = solved(d, 0.7);
  const Complex h = std::polar(0.9, 0.4);
  const BeltramiField a = beltrami(mesh(), d, {h, 0.7}, f);
  const BeltramiField b = beltrami(mesh(), d, {-h, 0.7}, f);
  for (int i = 0; i < mesh().num_vertices(); ++i) CHECK(std::abs(a.mu[i] - b.mu[i]) <= 1e-15);
}

TEST_CASE("sinh-Gordon identity") {
  const HiggsData d = HiggsData::hitchin(1.0);
  const Mesh fine = triangulate(build_octagon_surface(1.0), 0.05, 0.75);
  double l2[2];
  int level = 0;
  for (const Mesh* m : {&mesh(), &fine}) {
    const MetricField ref = solve_vortex(*m, HiggsData::hitchin({}), 1.0).field;
    const MetricField f = solve_vortex(*m, d, 1.0).field;
    const RealField u = sinh_gordon_u(*m, d, f);
    const RealField res = sinh_gordon_residual(*m, d, 1.0, f, ref, 0.36);
    int included = 0;
    double sum = 0.0, area = 0.0;
    for (int i = 0; i < m->num_vertices(); ++i) {
      if (std::isnan(res[i])) continue;
      ++included;
      CHECK(u[i] < 0.0);
      CHECK(std::abs(res[i]) < 1.0);
      sum += m->vertex_area[i] * res[i] * res[i];
      area += m->vertex_area[i];
    }
    CHECK(included > m->num_vertices() / 2);
    l2[level++] = std::sqrt(sum / area);
  }
  // Mean-square decay; the sup norm is limited by the spoke lines of the mesh.
  CHECK(l2[1] < l2[0] / 3.0);
  const MetricField ref = solved(HiggsData::hitchin({}), 1.0);
  CHECK_THROWS_AS(sinh_gordon_residual(mesh(), HiggsData::hitchin({}), 1.0, ref, ref, 0.36), PreconditionError);
}

TEST_CASE("degree-zero u is constant") {
  const HiggsData d = HiggsData::zero_degree(3.0, 1.0);
  const RealField u = sinh_gordon_u(mesh(), d, solved(d, 0.5));
  for (double v : u) CHECK(std::abs(v - u[0]) < 1e-12);
}

TEST_CASE("extension class: closed form vs coframe projection") {
  const HiggsData d = HiggsData::hitchin(1.0);
  const Parameters p{std::polar(1.0, 0.3), 0.8};
  const MetricField f = solved(d, 0.8);
  const BeltramiField mu = beltrami(mesh(), d, p, f);
  const ExtensionClassField ext = extension_class(mesh(), d, p, f, mu);
  CHECK(ext.max_disagreement <= 1e-10);
}

TEST_CASE("extension class is trivial in degree zero") {
  const HiggsData d = HiggsData::zero_degree(4.0, 1.0);
  const Parameters p{1.0, 0.5};
  const MetricField f = solved(d, 0.5);
  const ExtensionClassField ext = extension_class(mesh(), d, p, f, beltrami(mesh(), d, p, f));
  CHECK(sup_norm(ext.omega_coeff) <= 1e-12);
  CHECK(sup_norm(ext.projection) <= 1e-12);
}

TEST_CASE("extension class at mu = 0") {
  const HiggsData d = HiggsData::hitchin({});
  const Parameters p{Complex(0.6, 0.2), 1.1};
  const MetricField f = solved(d, 1.1);
  const ExtensionClassField ext = extension_class(mesh(), d, p, f, beltrami(mesh(), d, p, f));
  for (int i = 0; i < mesh().num_vertices(); ++i) {
    const Complex expect = p.hbar * p.R * p.R * std::exp(-2.0 * f.phi(i));
    CHECK(std::abs(ext.omega_coeff[i] - expect) <= 1e-12 * std::abs(expect));
  }
}

TEST_CASE("partial-oper transversality") {
  {
    const HiggsData d = HiggsData::zero_degree(4.0, 1.0);
    const Parameters p{std::polar(0.9, 0.5), 0.6};
    const MetricField f = solved(d, 0.6);
    CHECK(sup_norm(oper_transversality(mesh(), d, p, f, beltrami(mesh(), d, p, f))) <= 1e-13);
  }
  {
    const HiggsData d = HiggsData::hitchin(1.0);
    const Parameters p{1.0, 1.0};
    const MetricField f = solved(d, 1.0);
    CHECK(sup_norm(oper_transversality(mesh(), d, p, f, beltrami(mesh(), d, p, f))) <= 1e-9);
  }
}

TEST_CASE("Teichmuller form in degree zero") {
  const HiggsData d = HiggsData::zero_degree(1.0, 1.0);
  for (Complex hbar : {Complex(1.0, 0.0), std::polar(1.0, kPi / 6.0)}) {
    const Parameters p{hbar, 0.5};
    const BeltramiField mu = beltrami(mesh(), d, p, solved(d, 0.5));
    const TeichmullerReport r = teichmuller_form_check(mu, d, p);
    CHECK(r.defect <= 1e-13);
    CHECK(r.t == doctest::Approx(0.25));
    CHECK(r.distance == doctest::Approx(0.5 * std::log(1.25 / 0.75)));
  }
  CHECK_THROWS_AS(teichmuller_form_check({}, HiggsData::hitchin(1.0), {1.0, 0.5}), PreconditionError);
}
