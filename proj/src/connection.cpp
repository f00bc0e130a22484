#include "higgslab/connection.hpp"

#include <algorithm>
#include <cmath>

namespace higgslab {

namespace {

// Gradient (as gx + i gy) of the linear interpolant of f on triangle t.
Complex triangle_gradient(const Mesh& mesh, int t, const RealField& f) {
  const auto& tr = mesh.triangles[t];
  const double a2 = 2.0 * mesh.triangle_area(t);
  Complex g{};
  for (int k = 0; k < 3; ++k) {
    const Complex e = mesh.node_position[tr[(k + 2) % 3]] - mesh.node_position[tr[(k + 1) % 3]];
    g += f[mesh.node_vertex[tr[k]]] * (kI * e) / a2;
  }
  return g;
}

// Derivatives of a vertex field: 2-ring cubic fit, or (near the cone) the
// area-weighted star gradient and the cotangent Laplacian.
class Differentiator {
 public:
  explicit Differentiator(const Mesh& mesh) : mesh_(mesh) {}

  struct Jet {
    Complex dz;
    Complex dzbar;
    double laplacian = 0.0;
    bool fitted = true;
  };

  std::vector<Jet> operator()(const RealField& f) const {
    const int n = mesh_.num_vertices();
    std::vector<Jet> out(n);
    std::vector<Complex> star_grad(n, Complex{});
    std::vector<double> star_area(n, 0.0);
    const RealField lap = laplacian_apply(mesh_, f);
    bool need_star = false;
    LocalJet jet;
    for (int i = 0; i < n; ++i) {
      if (fit_jet(mesh_, f, i, 3, jet)) {
        out[i] = {jet.dz(), jet.dzbar(), jet.laplacian, true};
      } else {
        out[i].fitted = false;
        out[i].laplacian = lap[i];
        need_star = true;
      }
    }
    if (!need_star) return out;
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const auto v = mesh_.triangle_vertices(t);
      const Complex g = triangle_gradient(mesh_, t, f);
      const double a = mesh_.triangle_area(t);
      for (int k = 0; k < 3; ++k) {
        star_grad[v[k]] += a * g;
        star_area[v[k]] += a;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (out[i].fitted) continue;
      if (i == mesh_.cone_vertex) continue;  // star spans several sheets
      const Complex g = star_grad[i] / star_area[i];
      out[i].dz = 0.5 * std::conj(g);
      out[i].dzbar = 0.5 * g;
    }
    return out;
  }

 private:
  const Mesh& mesh_;
};

void split(const ComplexField& z, RealField& re, RealField& im) {
  re.resize(z.size());
  im.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    re[i] = z[i].real();
    im[i] = z[i].imag();
  }
}

ConnectionField assemble_scaled(const Mesh& mesh, const HiggsData& data, const Parameters& params,
                                const MetricField& field, Complex upper, Complex lower) {
  if (params.hbar == Complex{}) throw PreconditionError("hbar must be nonzero");
  const int n = mesh.num_vertices();
  if (static_cast<int>(field.psi.size()) != n) throw PreconditionError("field does not match the mesh");
  ConnectionField c;
  c.data = data;
  c.params = params;
  c.field = field;
  c.upper_scale = upper;
  c.lower_scale = lower;
  const CoefficientFields coef = coefficients_at(data, mesh);
  c.alpha = coef.alpha;
  c.beta = coef.beta;

  const SingularBackground bg = field.background_function();
  const auto jets = Differentiator(mesh)(field.psi);
  c.dphi.assign(n, Complex{});
  for (int i = 0; i < n; ++i) {
    if (!jets[i].fitted) ++c.fallback_vertices;
    if (i == mesh.cone_vertex) continue;
    c.dphi[i] = bg.dz(mesh.cone_offset[i]) + jets[i].dz;
  }
  c.dpsi_triangle.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) c.dpsi_triangle[t] = 0.5 * std::conj(triangle_gradient(mesh, t, field.psi));

  const Complex hinv = 1.0 / params.hbar;
  c.M.resize(n);
  c.N.resize(n);
  for (int i = 0; i < n; ++i) {
    const double phi = field.phi(i);
    c.M[i] << c.dphi[i], hinv * c.alpha[i], hinv * c.beta[i], -c.dphi[i];
    c.N[i] << 0.0, upper * std::conj(c.beta[i]) * std::exp(-2.0 * phi), lower * std::conj(c.alpha[i]) * std::exp(2.0 * phi),
        0.0;
  }
  return c;
}

}  // namespace

ConnectionField assemble_connection(const Mesh& mesh, const HiggsData& data, const Parameters& params,
                                    const MetricField& field) {
  const Complex s = params.hbar * params.R * params.R;
  return assemble_scaled(mesh, data, params, field, s, s);
}

ConnectionSample connection_in_triangle(const ConnectionField& conn, const Mesh& mesh, int t, Complex x) {
  const auto& tr = mesh.triangles[t];
  const Complex a = mesh.node_position[tr[0]], b = mesh.node_position[tr[1]], cpt = mesh.node_position[tr[2]];
  auto cr = [](Complex u, Complex v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double area2 = cr(b - a, cpt - a);
  const double l0 = cr(b - x, cpt - x) / area2, l1 = cr(cpt - x, a - x) / area2, l2 = 1.0 - l0 - l1;
  const auto v = mesh.triangle_vertices(t);
  const double psi = l0 * conn.field.psi[v[0]] + l1 * conn.field.psi[v[1]] + l2 * conn.field.psi[v[2]];
  const Complex alpha = l0 * conn.alpha[v[0]] + l1 * conn.alpha[v[1]] + l2 * conn.alpha[v[2]];
  const Complex beta = l0 * conn.beta[v[0]] + l1 * conn.beta[v[1]] + l2 * conn.beta[v[2]];
  const SingularBackground bg = conn.field.background_function();
  Complex off;
  const double r = mesh.distance_to_cone(x, &off);
  const double phi = bg.value(r) + psi;
  const Complex dphi = bg.dz(off) + conn.dpsi_triangle[t];
  const Complex hinv = 1.0 / conn.params.hbar;
  ConnectionSample s;
  s.M << dphi, hinv * alpha, hinv * beta, -dphi;
  s.N << 0.0, conn.upper_scale * std::conj(beta) * std::exp(-2.0 * phi),
      conn.lower_scale * std::conj(alpha) * std::exp(2.0 * phi), 0.0;
  return s;
}

CurvatureResidual curvature_residual(const ConnectionField& conn, const Mesh& mesh) {
  const int n = mesh.num_vertices();
  const Differentiator diff(mesh);
  const auto psi = diff(conn.field.psi);
  ComplexField n12(n), n21(n);
  for (int i = 0; i < n; ++i) {
    n12[i] = conn.N[i](0, 1);
    n21[i] = conn.N[i](1, 0);
  }
  RealField re, im;
  split(n12, re, im);
  const auto n12r = diff(re), n12i = diff(im);
  split(n21, re, im);
  const auto n21r = diff(re), n21i = diff(im);
  split(conn.alpha, re, im);
  const auto ar = diff(re), ai = diff(im);
  split(conn.beta, re, im);
  const auto br = diff(re), bi = diff(im);

  const SingularBackground bg = conn.field.background_function();
  const Complex hinv = 1.0 / conn.params.hbar;
  CurvatureResidual out;
  out.vertex_curvature.resize(n);
  for (int i = 0; i < n; ++i) {
    const Mat2& M = conn.M[i];
    const Mat2& N = conn.N[i];
    const Mat2 comm = M * N - N * M;
    double lap_phi;
    if (psi[i].fitted) {
      lap_phi = bg.laplacian(mesh.cone_distance[i]) + psi[i].laplacian;
    } else {
      lap_phi = conn.field.source[i] + psi[i].laplacian;
    }
    const Complex dz_n12 = n12r[i].dz + kI * n12i[i].dz;
    const Complex dz_n21 = n21r[i].dz + kI * n21i[i].dz;
    const Complex dzbar_m12 = hinv * (ar[i].dzbar + kI * ai[i].dzbar);
    const Complex dzbar_m21 = hinv * (br[i].dzbar + kI * bi[i].dzbar);
    Mat2 F;
    F(0, 0) = -0.25 * lap_phi + comm(0, 0);
    F(1, 1) = 0.25 * lap_phi + comm(1, 1);
    F(0, 1) = dz_n12 - dzbar_m12 + comm(0, 1);
    F(1, 0) = dz_n21 - dzbar_m21 + comm(1, 0);
    out.vertex_curvature[i] = F;
  }
  out.face_norm.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto v = mesh.triangle_vertices(t);
    double m = 0.0;
    for (int k = 0; k < 3; ++k) m = std::max(m, out.vertex_curvature[v[k]].norm());
    out.face_norm[t] = m;
  }
  return out;
}

double sup_outside(const Mesh& mesh, const RealField& face_values, double guard) {
  double m = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto v = mesh.triangle_vertices(t);
    if (mesh.cone_distance[v[0]] < guard || mesh.cone_distance[v[1]] < guard || mesh.cone_distance[v[2]] < guard)
      continue;
    m = std::max(m, face_values[t]);
  }
  return m;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

double entry_distance(const Mesh& mesh, const ConnectionField& a, const ConnectionField& b, double guard) {
  double d = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (mesh.cone_distance[i] < guard) continue;
    d = std::max(d, (a.M[i] - b.M[i]).cwiseAbs().maxCoeff());
    d = std::max(d, (a.N[i] - b.N[i]).cwiseAbs().maxCoeff());
  }
  return d;
}

}  // namespace

ConformalLimitResult conformal_limit(const Mesh& mesh, const HiggsData& data, Complex hbar,
                                     const std::vector<double>& R_list, const SolveOptions& opts, double guard) {
  if (hbar == Complex{}) throw PreconditionError("hbar must be nonzero");
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 0.0)) throw PreconditionError("R_list entries must be positive");
    if (i > 0 && !(R_list[i] < R_list[i - 1])) throw PreconditionError("R_list must be strictly decreasing");
  }
  const Parameters p0{hbar, 0.0};
  ConformalLimitResult out;
  if (data.family == Family::Hitchin) {
    // Limit metric: the unscaled problem for (0, beta).
    const VortexSolution base = solve_vortex(mesh, HiggsData::hitchin(Complex{}), 1.0, opts);
    if (!base.report.converged) throw DivergenceError("limit metric solve did not converge");
    out.limit = assemble_scaled(mesh, data, p0, base.field, hbar, 0.0);
    // Second construction: R-scaled (0, beta) problem at R = 1/2, shifted by -log R.
    const double r_alt = 0.5;
    VortexSolution alt = solve_vortex(mesh, HiggsData::hitchin(Complex{}), r_alt, opts);
    if (!alt.report.converged) throw DivergenceError("limit cross-check solve did not converge");
    for (double& v : alt.field.psi) v -= std::log(r_alt);
    const ConnectionField other = assemble_scaled(mesh, data, p0, alt.field, hbar, 0.0);
    out.independent_defect = entry_distance(mesh, out.limit, other, guard);
  } else {
    const VortexSolution flat = solve_vortex(mesh, data, 0.0, opts);
    out.limit = assemble_scaled(mesh, data, p0, flat.field, 0.0, 0.0);
    // A_{h0} + hbar^-1 Phi directly: constant off-diagonal entries, N = 0.
    double d = 0.0;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      Mat2 M;
      M << 0.0, data.alpha() / hbar, data.beta() / hbar, 0.0;
      d = std::max(d, (out.limit.M[i] - M).cwiseAbs().maxCoeff());
      d = std::max(d, out.limit.N[i].cwiseAbs().maxCoeff());
    }
    out.independent_defect = d;
  }
  for (const Mat2& N : out.limit.N) out.transversality = std::max(out.transversality, std::abs(N(1, 0)));

  std::vector<double> rs, lls;
  MetricField warm;
  bool have_warm = false;
  double prev_R = 0.0;
  for (double R : R_list) {
    SolveOptions o = opts;
    if (have_warm && data.family == Family::Hitchin) {
      // phi_R - log R varies slowly in R.
      for (double& v : warm.psi) v += std::log(R / prev_R);
      o.initial = warm;
    }
    prev_R = R;
    const VortexSolution sol = solve_vortex(mesh, data, R, o);
    if (!sol.report.converged) throw DivergenceError("vortex solve did not converge at R = " + std::to_string(R));
    warm = sol.field;
    have_warm = true;
    const ConnectionField conn = assemble_connection(mesh, data, {hbar, R}, sol.field);
    LimitRow row;
    row.R = R;
    row.distance = entry_distance(mesh, conn, out.limit, guard);
    for (const Mat2& N : conn.N) row.lower_left_dzbar = std::max(row.lower_left_dzbar, std::abs(N(1, 0)));
    if (!out.table.empty() && row.distance > out.table.back().distance) out.monotone = false;
    out.table.push_back(row);
    rs.push_back(R);
    lls.push_back(row.lower_left_dzbar);
  }
  out.slope = rs.size() >= 2 ? loglog_slope(rs, lls) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace higgslab
