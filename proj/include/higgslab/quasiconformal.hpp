#pragma once

#include "higgslab/higgs.hpp"
#include "higgslab/mesh.hpp"
#include "higgslab/types.hpp"
#include "higgslab/vortex.hpp"

namespace higgslab {

// mu = hbar^2 R^2 (conj(alpha) / beta) e^{2 phi}, frame coefficients in the omega chart.
struct BeltramiField {
  ComplexField mu;
  double sup_norm = 0.0;
  int argmax = 0;
  Family family = Family::Hitchin;
};

BeltramiField beltrami(const Mesh& mesh, const HiggsData& data, const Parameters& params, const MetricField& field);

// u = log |(alpha / beta) e^{2 phi}|^2.
RealField sinh_gordon_u(const Mesh& mesh, const HiggsData& data, const MetricField& field);

// (Delta u - 32 R^2 |alpha beta| sinh(u/2)) / g0 with g0 = e^{-2 phi0} from the
// reference field.  NaN on vertices within `guard` of the cone or without a fit.
RealField sinh_gordon_residual(const Mesh& mesh, const HiggsData& data, double R, const MetricField& field,
                               const MetricField& reference, double guard);

struct ExtensionClassField {
  ComplexField omega_coeff;  // closed formula, dvbar/nubar coefficient
  ComplexField projection;   // upper-right 1-form projected onto the coframe
  double max_disagreement = 0.0;
};

ExtensionClassField extension_class(const Mesh& mesh, const HiggsData& data, const Parameters& params,
                                    const MetricField& field, const BeltramiField& mu);

// |dvbar/nubar coefficient| of hbar^-1 beta dz + hbar R^2 conj(alpha) e^{2 phi} dzbar.
RealField oper_transversality(const Mesh& mesh, const HiggsData& data, const Parameters& params,
                              const MetricField& field, const BeltramiField& mu);

struct TeichmullerReport {
  double defect = 0.0;    // sup |mu |Q| - t conj(Q)|
  double t = 0.0;         // |hbar^2 R^2|
  double distance = 0.0;  // (1/2) log((1 + t) / (1 - t))
};

// Q = conj(hbar)^2 k beta^2.
TeichmullerReport teichmuller_form_check(const BeltramiField& mu, const HiggsData& data, const Parameters& params);

}  // namespace higgslab
