#include "higgslab/higgs.hpp"

#include <cmath>

namespace higgslab {

std::string family_name(Family f) { return f == Family::Hitchin ? "hitchin" : "zero_degree"; }

Family parse_family(const std::string& name) {
  if (name == "hitchin") return Family::Hitchin;
  if (name == "zero_degree") return Family::ZeroDegree;
  throw PreconditionError("unknown family '" + name + "'");
}

HiggsData HiggsData::hitchin(Complex c) {
  HiggsData d;
  d.family = Family::Hitchin;
  d.c = c;
  return d;
}

HiggsData HiggsData::zero_degree(Complex k, Complex c) {
  if (k == Complex{} || c == Complex{}) throw PreconditionError("zero_degree family needs k != 0 and c != 0");
  HiggsData d;
  d.family = Family::ZeroDegree;
  d.k = k;
  d.c = c;
  return d;
}

HiggsData HiggsData::hitchin_sampled(ComplexField q, std::vector<Complex> zeros) {
  HiggsData d;
  d.family = Family::Hitchin;
  d.sampled_q = std::move(q);
  d.q_zeros = std::move(zeros);
  return d;
}

Complex HiggsData::alpha() const {
  if (sampled_q) throw PreconditionError("sampled quadratic differential has no constant coefficient");
  return family == Family::Hitchin ? c : k * c;
}

Complex HiggsData::beta() const { return family == Family::Hitchin ? Complex{1.0, 0.0} : c; }

bool HiggsData::alpha_vanishes() const {
  if (sampled_q) {
    for (const Complex& v : *sampled_q)
      if (v != Complex{}) return false;
    return true;
  }
  return alpha() == Complex{};
}

std::vector<std::pair<int, int>> HiggsData::branching_divisor(const Mesh& mesh) const {
  if (family == Family::Hitchin) return {};
  // beta = c * omega vanishes to order 2 at the cone point.
  return {{mesh.cone_vertex, 2}};
}

CoefficientFields coefficients_at(const HiggsData& data, const Mesh& mesh) {
  const auto n = static_cast<std::size_t>(mesh.num_vertices());
  CoefficientFields out;
  if (data.sampled_q) {
    if (data.sampled_q->size() != n) throw PreconditionError("sampled q does not match the mesh");
    out.alpha = *data.sampled_q;
  } else {
    out.alpha.assign(n, data.alpha());
  }
  out.beta.assign(n, data.beta());
  return out;
}

bool admissible(const Parameters& params, const HiggsData& data) {
  if (params.hbar == Complex{} || !(params.R >= 0.0) || !std::isfinite(params.R)) return false;
  const double t = std::norm(params.hbar) * params.R * params.R;
  if (data.family == Family::Hitchin) return t <= 1.0 + 1e-14;
  return t < 1.0;
}

}  // namespace higgslab
