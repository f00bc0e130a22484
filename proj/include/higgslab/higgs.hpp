#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "higgslab/mesh.hpp"
#include "higgslab/types.hpp"

namespace higgslab {

enum class Family { Hitchin, ZeroDegree };

std::string family_name(Family f);
Family parse_family(const std::string& name);

// Coefficients are taken relative to the omega-adapted frame and dz.
//   Hitchin:     L = K^{1/2}, alpha = c (q = c dz^2), beta = 1
//   ZeroDegree:  L = O,       alpha = k c,           beta = c
struct HiggsData {
  Family family = Family::Hitchin;
  Complex c{0.0, 0.0};
  Complex k{1.0, 0.0};

  // Optional per-vertex quadratic differential (Hitchin only).  Zeros cannot
  // be detected reliably, so their locations are supplied with the samples.
  std::optional<ComplexField> sampled_q;
  std::vector<Complex> q_zeros;

  static HiggsData hitchin(Complex c);
  static HiggsData zero_degree(Complex k, Complex c);
  static HiggsData hitchin_sampled(ComplexField q, std::vector<Complex> zeros);

  // Constant frame coefficients (sampled data: throws).
  Complex alpha() const;
  Complex beta() const;
  bool alpha_vanishes() const;

  // Formal divisor of beta as (vertex class, multiplicity).
  std::vector<std::pair<int, int>> branching_divisor(const Mesh& mesh) const;
};

struct Parameters {
  Complex hbar{1.0, 0.0};
  double R = 1.0;
};

struct CoefficientFields {
  ComplexField alpha;
  ComplexField beta;
};

CoefficientFields coefficients_at(const HiggsData& data, const Mesh& mesh);

// |hbar^2 R^2| <= 1 (Hitchin) or < 1 (ZeroDegree).
bool admissible(const Parameters& params, const HiggsData& data);

}  // namespace higgslab
