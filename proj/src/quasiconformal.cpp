#include "higgslab/quasiconformal.hpp"

#include <cmath>
#include <limits>

namespace higgslab {

BeltramiField beltrami(const Mesh& mesh, const HiggsData& data, const Parameters& params, const MetricField& field) {
  if (!admissible(params, data)) throw PreconditionError("inadmissible parameters");
  const CoefficientFields cf = coefficients_at(data, mesh);
  const Complex scale = params.hbar * params.hbar * params.R * params.R;
  BeltramiField out;
  out.family = data.family;
  out.mu.resize(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (cf.beta[i] == Complex{}) throw PreconditionError("beta vanishes");
    out.mu[i] = scale * std::conj(cf.alpha[i]) / cf.beta[i] * std::exp(2.0 * field.phi(i));
    const double m = std::abs(out.mu[i]);
    if (m > out.sup_norm) {
      out.sup_norm = m;
      out.argmax = i;
    }
  }
  return out;
}

RealField sinh_gordon_u(const Mesh& mesh, const HiggsData& data, const MetricField& field) {
  const CoefficientFields cf = coefficients_at(data, mesh);
  RealField u(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i)
    u[i] = 2.0 * std::log(std::abs(cf.alpha[i] / cf.beta[i])) + 4.0 * field.phi(i);
  return u;
}

RealField sinh_gordon_residual(const Mesh& mesh, const HiggsData& data, double R, const MetricField& field,
                               const MetricField& reference, double guard) {
  if (data.family != Family::Hitchin || data.alpha_vanishes())
    throw PreconditionError("sinh-Gordon residual needs the Hitchin family with nonzero alpha");
  const int n = mesh.num_vertices();
  const CoefficientFields cf = coefficients_at(data, mesh);
  const SingularBackground bg = field.background_function();
  // Regular part of u; the background enters through its analytic Laplacian.
  RealField w(n);
  for (int i = 0; i < n; ++i) w[i] = 2.0 * std::log(std::abs(cf.alpha[i] / cf.beta[i])) + 4.0 * field.psi[i];
  const RealField u = sinh_gordon_u(mesh, data, field);
  RealField out(n, std::numeric_limits<double>::quiet_NaN());
  LocalJet jet;
  for (int i = 0; i < n; ++i) {
    if (mesh.cone_distance[i] < guard || !std::isfinite(w[i])) continue;
    if (!fit_jet(mesh, w, i, 3, jet)) continue;
    const double lap = jet.laplacian + 4.0 * bg.laplacian(mesh.cone_distance[i]);
    const double rhs = 32.0 * R * R * std::abs(cf.alpha[i] * cf.beta[i]) * std::sinh(0.5 * u[i]);
    const double g0 = std::exp(-2.0 * reference.phi(i));
    out[i] = (lap - rhs) / g0;
  }
  return out;
}

ExtensionClassField extension_class(const Mesh& mesh, const HiggsData& data, const Parameters& params,
                                    const MetricField& field, const BeltramiField& mu) {
  const CoefficientFields cf = coefficients_at(data, mesh);
  const Complex hbar = params.hbar;
  const double R2 = params.R * params.R;
  const double t2 = std::norm(hbar * hbar * R2);
  ExtensionClassField out;
  out.omega_coeff.resize(mesh.num_vertices());
  out.projection.resize(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Complex m = mu.mu[i];
    const double denom = 1.0 - std::norm(m);
    if (!(denom > 0.0)) throw PreconditionError("|mu| reaches 1");
    const Complex b = hbar * R2 * std::conj(cf.beta[i]) * std::exp(-2.0 * field.phi(i));
    // ZeroDegree has |mu| = t identically; the prefactor is then 0 up to rounding.
    const double ratio = t2 > 0.0 ? std::norm(m) / t2 : 0.0;
    out.omega_coeff[i] = (1.0 - ratio) / denom * b;
    const Complex a = cf.alpha[i] / hbar;
    out.projection[i] = (-m * a + b) / denom;
    out.max_disagreement = std::max(out.max_disagreement, std::abs(out.omega_coeff[i] - out.projection[i]));
  }
  return out;
}

RealField oper_transversality(const Mesh& mesh, const HiggsData& data, const Parameters& params,
                              const MetricField& field, const BeltramiField& mu) {
  const CoefficientFields cf = coefficients_at(data, mesh);
  const Complex hbar = params.hbar;
  RealField out(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Complex m = mu.mu[i];
    const double denom = 1.0 - std::norm(m);
    if (!(denom > 0.0)) throw PreconditionError("|mu| reaches 1");
    const Complex c = cf.beta[i] / hbar;
    const Complex d = hbar * params.R * params.R * std::conj(cf.alpha[i]) * std::exp(2.0 * field.phi(i));
    out[i] = std::abs((-m * c + d) / denom);
  }
  return out;
}

TeichmullerReport teichmuller_form_check(const BeltramiField& mu, const HiggsData& data, const Parameters& params) {
  if (data.family != Family::ZeroDegree) throw PreconditionError("Teichmuller form check is for the ZeroDegree family");
  TeichmullerReport rep;
  rep.t = std::abs(params.hbar * params.hbar) * params.R * params.R;
  rep.distance = 0.5 * std::log((1.0 + rep.t) / (1.0 - rep.t));
  const Complex Q = std::conj(params.hbar) * std::conj(params.hbar) * data.k * data.beta() * data.beta();
  for (const Complex& m : mu.mu) rep.defect = std::max(rep.defect, std::abs(m * std::abs(Q) - rep.t * std::conj(Q)));
  return rep;
}

}  // namespace higgslab
