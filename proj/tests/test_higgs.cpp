#include "doctest.h"
#include "higgslab/higgs.hpp"

using namespace higgslab;

TEST_CASE("family names") {
  CHECK(parse_family("hitchin") == Family::Hitchin);
  CHECK(parse_family("zero_degree") == Family::ZeroDegree);
  CHECK(family_name(Family::ZeroDegree) == "zero_degree");
  CHECK_THROWS_AS(parse_family("other"), PreconditionError);
}

TEST_CASE("frame coefficients") {
  const HiggsData h = HiggsData::hitchin({2.0, 1.0});
  CHECK(h.alpha() == Complex(2.0, 1.0));
  CHECK(h.beta() == Complex(1.0, 0.0));
  CHECK_FALSE(h.alpha_vanishes());
  CHECK(HiggsData::hitchin({}).alpha_vanishes());

  const HiggsData z = HiggsData::zero_degree(4.0, {0.0, 2.0});
  CHECK(z.alpha() == Complex(0.0, 8.0));
  CHECK(z.beta() == Complex(0.0, 2.0));
  CHECK_THROWS_AS(HiggsData::zero_degree(0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(HiggsData::zero_degree(1.0, 0.0), PreconditionError);
}

TEST_CASE("branching divisor has even degree") {
  const Mesh m = triangulate(build_octagon_surface(1.0), 0.2, 0.75);
  auto degree = [](const std::vector<std::pair<int, int>>& d) {
    int s = 0;
    for (const auto& [v, k] : d) s += k;
    return s;
  };
  CHECK(degree(HiggsData::hitchin(1.0).branching_divisor(m)) == 0);
  const auto zd = HiggsData::zero_degree(1.0, 1.0).branching_divisor(m);
  CHECK(degree(zd) == 2);
  REQUIRE(zd.size() == 1);
  CHECK(zd[0].first == m.cone_vertex);
}

TEST_CASE("admissibility") {
  const HiggsData h = HiggsData::hitchin(1.0);
  const HiggsData z = HiggsData::zero_degree(1.0, 1.0);
  CHECK(admissible({1.0, 1.0}, h));
  CHECK_FALSE(admissible({1.0, 1.0}, z));
  CHECK(admissible({1.0, 0.5}, z));
  CHECK(admissible({std::polar(1.0, 0.7), 1.0}, h));
  CHECK_FALSE(admissible({1.0, 1.1}, h));
  CHECK_FALSE(admissible({0.0, 0.5}, h));
  CHECK_FALSE(admissible({1.0, -0.5}, z));
  CHECK(admissible({1.0, 0.0}, z));
}

TEST_CASE("coefficient fields") {
  const Mesh m = triangulate(build_octagon_surface(1.0), 0.2, 0.75);
  const CoefficientFields cf = coefficients_at(HiggsData::zero_degree(3.0, 2.0), m);
  REQUIRE(cf.alpha.size() == static_cast<std::size_t>(m.num_vertices()));
  for (int i = 0; i < m.num_vertices(); ++i) {
    CHECK(cf.alpha[i] == Complex(6.0, 0.0));
    CHECK(cf.beta[i] == Complex(2.0, 0.0));
  }
}
