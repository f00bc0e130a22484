#include <cmath>

#include "doctest.h"
#include "higgslab/vortex.hpp"

using namespace higgslab;

namespace {

const Mesh& coarse_mesh() {
  static const Mesh m = triangulate(build_octagon_surface(1.0), 0.1, 0.75);
  return m;
}

}  // namespace

TEST_CASE("singular background profile") {
  const SingularBackground bg{2.0 / 3.0, 0.2};
  CHECK(bg.cutoff(0.05) == 1.0);
  CHECK(bg.cutoff(0.25) == 0.0);
  CHECK(bg.value(0.05) == doctest::Approx(2.0 / 3.0 * std::log(0.05)));
  CHECK(bg.value(0.3) == 0.0);
  // Harmonic where chi = 1.
  CHECK(std::abs(bg.laplacian(0.07)) < 1e-12);
  // Finite-difference check of the radial derivative in the transition zone.
  const double r = 0.15, h = 1e-6;
  CHECK(bg.radial_derivative(r) == doctest::Approx((bg.value(r + h) - bg.value(r - h)) / (2 * h)).epsilon(1e-6));
  const double d2 = (bg.value(r + h) - 2 * bg.value(r) + bg.value(r - h)) / (h * h);
  CHECK(bg.laplacian(r) == doctest::Approx(d2 + bg.radial_derivative(r) / r).epsilon(1e-4));
  // d/dz of kappa log|w| is kappa / (2 w).
  const Complex w(0.03, 0.04);
  CHECK(std::abs(bg.dz(w) - 2.0 / 3.0 / (2.0 * w)) < 1e-12);
}

TEST_CASE("singular coefficients per family") {
  CHECK(singular_coefficient_for(HiggsData::hitchin(1.0)) == doctest::Approx(2.0 / 3.0));
  CHECK(singular_coefficient_for(HiggsData::zero_degree(1.0, 1.0)) == 0.0);
}

TEST_CASE("degree-zero closed form") {
  for (double k : {0.1, 1.0, 4.0, 10.0}) {
    const VortexSolution s = solve_vortex(coarse_mesh(), HiggsData::zero_degree(k, 1.0), 0.5);
    CHECK(s.report.converged);
    const double exact = -0.5 * std::log(k);
    for (int i = 0; i < coarse_mesh().num_vertices(); ++i) CHECK(std::abs(s.field.phi(i) - exact) <= 1e-9);
  }
}

TEST_CASE("degree-zero flat limit accepts R = 0") {
  const VortexSolution s = solve_vortex(coarse_mesh(), HiggsData::zero_degree(4.0, 1.0), 0.0);
  CHECK(s.report.converged);
  CHECK_THROWS_AS(solve_vortex(coarse_mesh(), HiggsData::hitchin(1.0), 0.0), PreconditionError);
}

TEST_CASE("hyperbolic calibration") {
  const Mesh& m = coarse_mesh();
  const VortexSolution s = solve_vortex(m, HiggsData::hitchin({}), 1.0);
  REQUIRE(s.report.converged);
  CHECK(s.report.final_residual_norm <= 1e-10);
  // Gauss-Bonnet: K = -4 and chi = -2 give area pi and total curvature -4 pi.
  CHECK(total_curvature(m, s.field) == doctest::Approx(-4.0 * kPi).epsilon(1e-9));
  CHECK(metric_area(m, s.field) == doctest::Approx(kPi).epsilon(0.02));
  const RealField K = gaussian_curvature(m, s.field);
  for (int i = 0; i < m.num_vertices(); ++i)
    if (m.cone_distance[i] >= 0.36 && std::isfinite(K[i])) CHECK(K[i] == doctest::Approx(-4.0).epsilon(0.05));
}

TEST_CASE("residual is small at the solution and O(1) off it") {
  const Mesh& m = coarse_mesh();
  const HiggsData d = HiggsData::hitchin(1.0);
  const VortexSolution s = solve_vortex(m, d, 1.0);
  REQUIRE(s.report.converged);
  CHECK(sup_norm(vortex_residual(m, d, 1.0, s.field)) <= 1e-10);
  const MetricField zero = make_metric_field(m, s.field.singular_coefficient, s.field.cutoff_radius);
  CHECK(sup_norm(vortex_residual(m, d, 1.0, zero)) > 0.1);
  // Residual history ends below tolerance and damping stays in (0, 1].
  CHECK(s.report.residual_history.back() <= 1e-10);
  for (double t : s.report.damping_history) CHECK((t > 0.0 && t <= 1.0));
}

TEST_CASE("scaling identity") {
  for (double R : {1.0, 0.5, 0.1}) {
    const RescaleReport r = rescale_check(coarse_mesh(), HiggsData::hitchin(1.0), R);
    CHECK(r.scaled.converged);
    CHECK(r.unscaled.converged);
    CHECK(r.defect <= 1e-9);
  }
}

TEST_CASE("divergence is reported") {
  const Mesh& m = coarse_mesh();
  MetricField f = make_metric_field(m, 0.0, 0.12, RealField(m.num_vertices(), 60.0));
  CHECK_THROWS_AS(vortex_residual(m, HiggsData::zero_degree(1.0, 1.0), 0.5, f), DivergenceError);
}

TEST_CASE("warm start converges in few iterations") {
  const Mesh& m = coarse_mesh();
  const HiggsData d = HiggsData::hitchin(1.0);
  const VortexSolution a = solve_vortex(m, d, 1.0);
  SolveOptions o;
  o.initial = a.field;
  const VortexSolution b = solve_vortex(m, d, 1.0, o);
  CHECK(b.report.converged);
  CHECK(b.report.iterations <= 2);
}
