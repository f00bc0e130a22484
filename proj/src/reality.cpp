#include "higgslab/reality.hpp"

#include <Eigen/SVD>
#include <cctype>
#include <cmath>
#include <limits>

namespace higgslab {

namespace {

Mat2 inverse(const Mat2& m) {
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r / m.determinant();
}

double imag_mass(const Mat2& m) { return m.imag().cwiseAbs().sum(); }

}  // namespace

RealStructure make_real_structure(const Mesh& mesh, const MetricField& field) {
  RealStructure s;
  s.C.resize(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double e = std::exp(field.phi(i));
    s.C[i] << 0.0, 1.0 / e, e, 0.0;
    s.involution_defect = std::max(s.involution_defect, (s.C[i] * s.C[i].conjugate() - Mat2::Identity()).norm());
  }
  return s;
}

RealityResidual reality_residual(const ConnectionField& conn, const RealStructure& structure, const Mesh& mesh,
                                 double guard) {
  const int n = mesh.num_vertices();
  // Area-weighted star average of the piecewise-linear d_z psi.
  ComplexField grad(n, Complex{});
  RealField weight(n, 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.triangle_area(t);
    for (int v : mesh.triangle_vertices(t)) {
      grad[v] += a * conn.dpsi_triangle[t];
      weight[v] += a;
    }
  }
  const SingularBackground bg = conn.field.background_function();
  RealityResidual out;
  out.preservation.assign(n, 0.0);
  out.gradient.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Mat2& C = structure.C[i];
    const Mat2& M = conn.M[i];
    const Mat2& N = conn.N[i];
    // Algebraic part: B without its diagonal, C constant.
    Mat2 Mo = M, No = N;
    Mo.diagonal().setZero();
    const Mat2 pz = Mo * C - C * No.conjugate();
    const Mat2 pzb = No * C - C * Mo.conjugate();
    out.preservation[i] = std::sqrt(pz.squaredNorm() + pzb.squaredNorm());
    out.preservation_sup = std::max(out.preservation_sup, out.preservation[i]);

    if (i == mesh.cone_vertex) continue;
    const Complex dphi = grad[i] / weight[i] + bg.dz(mesh.cone_offset[i]);
    Mat2 dC_dz, dC_dzb;
    dC_dz << 0.0, -dphi * C(0, 1), dphi * C(1, 0), 0.0;
    dC_dzb << 0.0, -std::conj(dphi) * C(0, 1), std::conj(dphi) * C(1, 0), 0.0;
    Mat2 Md = Mat2::Zero();
    Md.diagonal() = M.diagonal();
    const Mat2 gz = dC_dz + Md * C;
    const Mat2 gzb = dC_dzb - C * Md.conjugate();
    out.gradient[i] = std::sqrt(gz.squaredNorm() + gzb.squaredNorm());
    if (mesh.cone_distance[i] >= guard) out.gradient_sup = std::max(out.gradient_sup, out.gradient[i]);
  }
  return out;
}

HolonomyRealityReport holonomy_reality_check(const std::vector<Sl2>& holonomies) {
  HolonomyRealityReport rep;
  const std::string names = "abcd";
  std::vector<Mat2> letters;
  std::vector<char> symbols;
  for (std::size_t g = 0; g < holonomies.size() && g < names.size(); ++g) {
    letters.push_back(holonomies[g]);
    symbols.push_back(names[g]);
    letters.push_back(inverse(holonomies[g]));
    symbols.push_back(static_cast<char>(std::toupper(names[g])));
  }
  for (const Mat2& g : holonomies) rep.generator_imag = std::max(rep.generator_imag, std::abs(g.trace().imag()));

  const int L = static_cast<int>(letters.size());
  auto cancels = [&](int x, int y) { return (x ^ 1) == y; };
  std::vector<std::pair<std::vector<int>, Mat2>> frontier;
  for (int x = 0; x < L; ++x) frontier.push_back({{x}, letters[x]});
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::pair<std::vector<int>, Mat2>> next;
    for (const auto& [w, m] : frontier) {
      std::string s;
      for (int x : w) s += symbols[x];
      const Complex tr = m.trace();
      rep.words.push_back({s, tr});
      rep.word_imag = std::max(rep.word_imag, std::abs(tr.imag()));
      if (len == 3) continue;
      for (int x = 0; x < L; ++x) {
        if (cancels(w.back(), x)) continue;
        auto w2 = w;
        w2.push_back(x);
        next.push_back({w2, m * letters[x]});
      }
    }
    frontier = std::move(next);
  }

  // conj(A) P = P A for every generator: a homogeneous system in vec(P).
  if (holonomies.empty()) return rep;
  Eigen::MatrixXcd S(4 * holonomies.size(), 4);
  for (std::size_t g = 0; g < holonomies.size(); ++g) {
    const Mat2 Ab = holonomies[g].conjugate();
    const Mat2& A = holonomies[g];
    for (int col = 0; col < 4; ++col) {
      Mat2 E = Mat2::Zero();
      E(col % 2, col / 2) = 1.0;
      const Mat2 r = Ab * E - E * A;
      for (int k = 0; k < 4; ++k) S(4 * g + k, col) = r(k % 2, k / 2);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeFullV);
  rep.commutation_residual = svd.singularValues()(3) / std::max(1.0, svd.singularValues()(0));
  const Eigen::Vector4cd p = svd.matrixV().col(3);
  Mat2 P;
  P << p(0), p(2), p(1), p(3);
  // P conj(P) = c I with c > 0 for a real form; then Q = X + conj(X) P
  // satisfies conj(Q) P = Q and Q A Q^-1 is real.
  const Mat2 PP = P * P.conjugate();
  const Complex c = 0.5 * PP.trace();
  if (!(c.real() > 0.0)) return rep;
  P /= std::sqrt(c.real());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    const Complex x = std::polar(1.0, kPi * k / 8.0);
    const Mat2 Q = x * Mat2::Identity() + std::conj(x) * P;
    if (std::abs(Q.determinant()) < 1e-8) continue;
    const Mat2 Qi = inverse(Q);
    double mass = 0.0;
    for (const Mat2& A : holonomies) mass += imag_mass(Q * A * Qi);
    best = std::min(best, mass);
  }
  if (std::isfinite(best)) {
    rep.conjugator_found = true;
    rep.conjugated_imag = best;
  }
  return rep;
}

double min_fixed_line_angle(const Mesh& mesh, const MetricField& field) {
  double m = kPi / 2.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double e = std::exp(field.phi(i));
    m = std::min(m, std::asin(e / std::sqrt(1.0 + e * e)));
  }
  return m;
}

}  // namespace higgslab
