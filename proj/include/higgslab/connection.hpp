#pragma once

#include <string>
#include <vector>

#include "higgslab/higgs.hpp"
#include "higgslab/mesh.hpp"
#include "higgslab/surface.hpp"
#include "higgslab/types.hpp"
#include "higgslab/vortex.hpp"

namespace higgslab {

// d + M dz + N dz^bar in the omega-adapted frame, with
//   M = [[d_z phi, hbar^-1 alpha], [hbar^-1 beta, -d_z phi]]
//   N = [[0, upper_scale * conj(beta) e^{-2 phi}], [lower_scale * conj(alpha) e^{2 phi}, 0]].
// For the R-family upper_scale = lower_scale = hbar R^2; the conformal limit
// has upper_scale = hbar (phi the unscaled limit metric) and lower_scale = 0.
struct ConnectionField {
  HiggsData data;
  Parameters params;
  MetricField field;
  Complex upper_scale;
  Complex lower_scale;
  std::string frame_note = "omega-adapted frame";

  ComplexField alpha;
  ComplexField beta;
  ComplexField dphi;                  // d_z phi per vertex (fit), 0 at the cone
  ComplexField dpsi_triangle;         // d_z psi of the linear interpolant per triangle
  std::vector<Mat2> M;
  std::vector<Mat2> N;
  int fallback_vertices = 0;          // vertices whose derivatives used the 1-ring fallback
};

ConnectionField assemble_connection(const Mesh& mesh, const HiggsData& data, const Parameters& params,
                                    const MetricField& field);

// M and N at a point of triangle t: phi = background (exact) + linear psi,
// d_z phi = d_z background + the triangle's d_z psi.
struct ConnectionSample {
  Mat2 M;
  Mat2 N;
};
ConnectionSample connection_in_triangle(const ConnectionField& conn, const Mesh& mesh, int t, Complex x);

// Curvature d_z N - d_zbar M + [M, N] per vertex from fitted derivatives;
// per face the largest Frobenius norm over its corners.
struct CurvatureResidual {
  std::vector<Mat2> vertex_curvature;
  RealField face_norm;
};
CurvatureResidual curvature_residual(const ConnectionField& conn, const Mesh& mesh);

// Sup of face_norm over faces whose corners all lie at cone distance >= guard.
double sup_outside(const Mesh& mesh, const RealField& face_values, double guard);

// ---- transport -------------------------------------------------------------

using Sl2 = Mat2;

struct Crossing {
  int edge = 0;         // edge left through
  Complex translation;  // applied to re-enter through the partner edge
};

// Straight pieces inside the polygon; piece k+1 starts where piece k ends
// after the crossing's translation.
struct Path {
  std::vector<std::pair<Complex, Complex>> pieces;
  std::vector<Crossing> crossings;
  double clearance = 0.0;  // distance to the nearest cone copy
};

// Developed straight line from `start` along each displacement in turn,
// re-entering through paired edges.
Path developed_path(const TranslationSurface& surface, Complex start, const std::vector<Complex>& displacements);

struct TransportOptions {
  double tolerance = 1e-10;
  double guard_radius = 0.0;  // paths must keep clearance > guard_radius
};

struct TransportResult {
  Sl2 value;
  double det_drift = 0.0;  // |det - 1| before renormalisation
  int steps = 0;
};

// Y' = Y (M dz/ds + N dzbar/ds), Y(0) = I.  Constant-coefficient fields use
// exact segment exponentials; otherwise adaptive RK4 per triangle crossing.
TransportResult transport(const ConnectionField& conn, const Path& path, const Mesh& mesh,
                          const TransportOptions& opts = {});

// exp(A) for trace-free A.
Mat2 expm_traceless(const Mat2& A);

// Chord loops gamma_j from `base` along the pairing translation of edge j.
std::vector<Path> generator_chords(const TranslationSurface& surface, Complex base);

struct HolonomyReport {
  std::vector<Sl2> chords;      // gamma_0..gamma_3
  std::vector<Sl2> generators;  // A1, B1, A2, B2
  std::vector<Complex> traces;
  double relation_defect = 0.0;
  double max_det_drift = 0.0;
  double clearance = 0.0;
};

// Standard generators A1 = g0, B1 = g1^-1, A2 = g1^-1 g0 g2, B2 = g3^-1 g2 for
// the opposite-sides octagon; relation [A1,B1][A2,B2] = I.
HolonomyReport holonomy_generators(const ConnectionField& conn, const TranslationSurface& surface, const Mesh& mesh,
                                   const TransportOptions& opts = {}, Complex base = {});

double relation_defect(const std::vector<Sl2>& generators);

// ---- conformal limit -------------------------------------------------------

struct LimitRow {
  double R = 0.0;
  double distance = 0.0;          // entrywise sup distance to the limit (outside guard)
  double lower_left_dzbar = 0.0;  // sup |N_21|
};

struct ConformalLimitResult {
  ConnectionField limit;
  std::vector<LimitRow> table;
  double slope = 0.0;              // least-squares slope of log lower_left_dzbar vs log R
  double independent_defect = 0.0; // limit entries vs a second construction
  double transversality = 0.0;     // sup |N_21| of the limit connection
  bool monotone = true;
};

ConformalLimitResult conformal_limit(const Mesh& mesh, const HiggsData& data, Complex hbar,
                                     const std::vector<double>& R_list, const SolveOptions& opts = {},
                                     double guard = 0.0);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace higgslab
