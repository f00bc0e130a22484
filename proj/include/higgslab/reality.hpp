#pragma once

#include <string>
#include <vector>

#include "higgslab/connection.hpp"
#include "higgslab/mesh.hpp"
#include "higgslab/types.hpp"
#include "higgslab/vortex.hpp"

namespace higgslab {

// tau(v) = C conj(v), C = [[0, e^{-phi}], [e^{phi}, 0]] per vertex.
struct RealStructure {
  std::vector<Mat2> C;
  double involution_defect = 0.0;  // sup |C conj(C) - I|
};

RealStructure make_real_structure(const Mesh& mesh, const MetricField& field);

// dC + BC - C conj(B) with B = M dz + N dzbar, split per vertex into the
// algebraic part (alpha, beta terms, proportional to hbar^-1 - conj(hbar) R^2)
// and the d phi part, where dC uses star-averaged triangle gradients and M the
// fitted d_z phi.  The cone vertex has no gradient part.
struct RealityResidual {
  RealField preservation;
  RealField gradient;
  double preservation_sup = 0.0;
  double gradient_sup = 0.0;  // over vertices at cone distance >= guard
};

RealityResidual reality_residual(const ConnectionField& conn, const RealStructure& structure, const Mesh& mesh,
                                 double guard = 0.0);

struct WordTrace {
  std::string word;  // letters a, b, c, d for A1, B1, A2, B2; capitals are inverses
  Complex trace;
};

struct HolonomyRealityReport {
  double generator_imag = 0.0;  // max |Im tr| over generators
  double word_imag = 0.0;       // max |Im tr| over reduced words of length <= 3
  std::vector<WordTrace> words;
  double commutation_residual = 0.0;  // smallest singular value of conj(A) P = P A
  double conjugated_imag = 0.0;       // sum of |Im| entries after conjugation
  bool conjugator_found = false;
};

HolonomyRealityReport holonomy_reality_check(const std::vector<Sl2>& holonomies);

// Angle between the tau-fixed line span(1, e^phi) and span(1, 0); minimum over vertices.
double min_fixed_line_angle(const Mesh& mesh, const MetricField& field);

}  // namespace higgslab
