#pragma once

#include <optional>
#include <string>
#include <vector>

#include "higgslab/higgs.hpp"
#include "higgslab/mesh.hpp"
#include "higgslab/types.hpp"

namespace higgslab {

// f(r) = kappa * chi(r) * log r with chi a quintic smoothstep cutoff:
// chi = 1 on r <= cutoff/2, chi = 0 on r >= cutoff.
struct SingularBackground {
  double coefficient = 0.0;
  double cutoff_radius = 1.0;

  double cutoff(double r) const;
  double value(double r) const;
  double radial_derivative(double r) const;
  // f'' + f'/r, smooth and supported in the annulus.
  double laplacian(double r) const;
  // d/dz of f(|w|) where w is the offset from the cone point.
  Complex dz(Complex offset) const;
};

// kappa for a family: Hitchin frames degenerate at the cone (h ~ r^{2/3}).
double singular_coefficient_for(const HiggsData& data);

// phi = background + psi, with background = kappa chi log r.
struct MetricField {
  RealField psi;
  double singular_coefficient = 0.0;
  double cutoff_radius = 1.0;

  // Pointwise background at each vertex (the cone vertex uses r_eff, half its
  // shortest incident edge).
  RealField background;
  // e^{2 bg} and e^{-2 bg} (star averages at the cone vertex) and the
  // regular part of Laplacian(bg): L bg minus the cone point flux.
  RealField weight_plus;
  RealField weight_minus;
  RealField source;

  SingularBackground background_function() const { return {singular_coefficient, cutoff_radius}; }
  double phi(int v) const { return background[v] + psi[v]; }
  RealField phi_field() const;
};

// Builds the background data for a mesh; psi defaults to zero.
MetricField make_metric_field(const Mesh& mesh, double singular_coefficient, double cutoff_radius,
                              RealField psi = {});

// (1/4) Laplacian(phi) - R^2 (|alpha|^2 e^{2 phi} - |beta|^2 e^{-2 phi}) per vertex.
// Throws DivergenceError if |phi| > 50 anywhere.
RealField vortex_residual(const Mesh& mesh, const HiggsData& data, double R, const MetricField& field);

struct SolveReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  double final_step_norm = 0.0;
  std::vector<double> damping_history;
  std::vector<double> residual_history;
  bool converged = false;
  std::string message;
};

struct SolveOptions {
  double tolerance = 1e-10;
  int max_iter = 50;
  double cutoff_radius = 0.12;
  std::optional<MetricField> initial;
};

struct VortexSolution {
  MetricField field;
  SolveReport report;
};

// Damped Newton on psi.  R = 0 is accepted only for the ZeroDegree family.
VortexSolution solve_vortex(const Mesh& mesh, const HiggsData& data, double R, const SolveOptions& opts = {});

struct RescaleReport {
  double defect = 0.0;
  SolveReport scaled;
  SolveReport unscaled;
};

// Solves the R problem for (alpha, beta) and the R = 1 problem for
// (R^2 alpha, beta); returns sup |phi_R - (phi_1 + log R)|.
RescaleReport rescale_check(const Mesh& mesh, const HiggsData& data, double R, const SolveOptions& opts = {});

// e^{2 phi} Laplacian(phi): curvature of e^{-2 phi}|dz|^2, from 2-ring cubic
// fits.  NaN where no fit is available (cone and its 2-ring).
RealField gaussian_curvature(const Mesh& mesh, const MetricField& field);

// sum_i area_i (source_i + (L psi)_i): integral of K over the metric.
double total_curvature(const Mesh& mesh, const MetricField& field);

// Area of e^{-2 phi}|dz|^2 by triangle quadrature: psi linear per triangle,
// background exact, singular-aware rule on triangles at the cone.
double metric_area(const Mesh& mesh, const MetricField& field);

}  // namespace higgslab
