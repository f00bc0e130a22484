#include "higgslab/vortex.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss.hpp>

namespace higgslab {

namespace {

constexpr double kPhiLimit = 50.0;
constexpr double kArmijo = 1e-4;
constexpr double kMinDamping = 1.0 / 1024.0 / 1024.0;

// 1 - smoothstep on s in [0, 1], with first and second derivatives in s.
void quintic_cutoff(double s, double& v, double& d1, double& d2) {
  if (s <= 0.0) {
    v = 1.0;
    d1 = d2 = 0.0;
  } else if (s >= 1.0) {
    v = 0.0;
    d1 = d2 = 0.0;
  } else {
    v = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    d1 = -30.0 * s * s * (1.0 - s) * (1.0 - s);
    d2 = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
  }
}

// Hat-weighted average of g(r) over the star of the cone vertex, r measured
// from the cone node of each triangle.  u = s^3 removes the r^{-4/3}
// singularity of e^{-2 bg}.
template <class G>
double cone_star_average(const Mesh& mesh, G g) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  double num = 0.0, den = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (mesh.node_vertex[tr[k]] != mesh.cone_vertex) continue;
      const Complex a = mesh.node_position[tr[k]];
      const Complex eb = mesh.node_position[tr[(k + 1) % 3]] - a;
      const Complex ec = mesh.node_position[tr[(k + 2) % 3]] - a;
      const double area = mesh.triangle_area(t);
      double acc = 0.0;
      for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        for (int si = -1; si <= 1; si += 2) {
          if (i == 0 && si < 0 && Rule::abscissa()[0] == 0.0) continue;
          const double s = 0.5 * (1.0 + si * Rule::abscissa()[i]);
          const double ws = 0.5 * Rule::weights()[i];
          const double u = s * s * s;
          for (std::size_t j = 0; j < Rule::abscissa().size(); ++j) {
            for (int sj = -1; sj <= 1; sj += 2) {
              if (j == 0 && sj < 0 && Rule::abscissa()[0] == 0.0) continue;
              const double v = 0.5 * (1.0 + sj * Rule::abscissa()[j]);
              const double wv = 0.5 * Rule::weights()[j];
              const double r = u * std::abs((1.0 - v) * eb + v * ec);
              // dx = 2 area u du dv, hat = 1 - u, du = 3 s^2 ds
              acc += ws * wv * g(r) * (1.0 - u) * u * 3.0 * s * s;
            }
          }
        }
      }
      num += 2.0 * area * acc;
      den += area / 3.0;
    }
  }
  return num / den;
}

}  // namespace

double SingularBackground::cutoff(double r) const {
  double v, d1, d2;
  const double half = 0.5 * cutoff_radius;
  quintic_cutoff((r - half) / half, v, d1, d2);
  return v;
}

double SingularBackground::value(double r) const {
  if (coefficient == 0.0 || r >= cutoff_radius) return 0.0;
  return coefficient * cutoff(r) * std::log(r);
}

double SingularBackground::radial_derivative(double r) const {
  if (coefficient == 0.0 || r >= cutoff_radius) return 0.0;
  const double half = 0.5 * cutoff_radius;
  double v, d1, d2;
  quintic_cutoff((r - half) / half, v, d1, d2);
  return coefficient * (d1 / half * std::log(r) + v / r);
}

double SingularBackground::laplacian(double r) const {
  if (coefficient == 0.0 || r >= cutoff_radius || r <= 0.5 * cutoff_radius) return 0.0;
  const double half = 0.5 * cutoff_radius;
  double v, d1, d2;
  quintic_cutoff((r - half) / half, v, d1, d2);
  const double c1 = d1 / half, c2 = d2 / (half * half);
  return coefficient * (c2 * std::log(r) + c1 * (2.0 + std::log(r)) / r);
}

Complex SingularBackground::dz(Complex offset) const {
  const double r = std::abs(offset);
  if (r == 0.0) return {};
  return radial_derivative(r) * std::conj(offset) / (2.0 * r);
}

double singular_coefficient_for(const HiggsData& data) {
  return data.family == Family::Hitchin ? 2.0 / 3.0 : 0.0;
}

RealField MetricField::phi_field() const {
  RealField out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = background[i] + psi[i];
  return out;
}

MetricField make_metric_field(const Mesh& mesh, double singular_coefficient, double cutoff_radius, RealField psi) {
  if (!(cutoff_radius > 0.0)) throw PreconditionError("cutoff_radius must be positive");
  const int n = mesh.num_vertices();
  if (psi.empty()) psi.assign(n, 0.0);
  if (static_cast<int>(psi.size()) != n) throw PreconditionError("psi does not match the mesh");
  MetricField f;
  f.psi = std::move(psi);
  f.singular_coefficient = singular_coefficient;
  f.cutoff_radius = cutoff_radius;
  const SingularBackground bg = f.background_function();
  f.background.assign(n, 0.0);
  f.weight_plus.assign(n, 1.0);
  f.weight_minus.assign(n, 1.0);
  f.source.assign(n, 0.0);
  if (singular_coefficient == 0.0) return f;
  const int c = mesh.cone_vertex;
  for (int i = 0; i < n; ++i) {
    if (i == c) continue;
    f.background[i] = bg.value(mesh.cone_distance[i]);
    f.weight_plus[i] = std::exp(2.0 * f.background[i]);
    f.weight_minus[i] = std::exp(-2.0 * f.background[i]);
  }
  f.background[c] = bg.value(0.5 * mesh.shortest_edge_at(c));
  f.weight_plus[c] = cone_star_average(mesh, [&](double r) { return std::exp(2.0 * bg.value(r)); });
  f.weight_minus[c] = cone_star_average(mesh, [&](double r) { return std::exp(-2.0 * bg.value(r)); });
  // The discrete operator applied to the background, minus the point flux
  // kappa * (cone angle) that log r carries into the cone cell.
  f.source = laplacian_apply(mesh, f.background);
  f.source[c] -= singular_coefficient * mesh.cone_angle_sum() / mesh.vertex_area[c];
  return f;
}

RealField vortex_residual(const Mesh& mesh, const HiggsData& data, double R, const MetricField& field) {
  const int n = mesh.num_vertices();
  if (static_cast<int>(field.psi.size()) != n) throw PreconditionError("field does not match the mesh");
  for (int i = 0; i < n; ++i) {
    const double p = field.phi(i);
    if (!std::isfinite(p) || std::abs(p) > kPhiLimit)
      throw DivergenceError("log-metric left [-50, 50] at vertex " + std::to_string(i));
  }
  const CoefficientFields coef = coefficients_at(data, mesh);
  RealField out = laplacian_apply(mesh, field.psi);
  const double r2 = R * R;
  for (int i = 0; i < n; ++i) {
    const double ep = field.weight_plus[i] * std::exp(2.0 * field.psi[i]);
    const double em = field.weight_minus[i] * std::exp(-2.0 * field.psi[i]);
    out[i] = 0.25 * (field.source[i] + out[i]) - r2 * (std::norm(coef.alpha[i]) * ep - std::norm(coef.beta[i]) * em);
  }
  return out;
}

namespace {

VortexSolution newton(const Mesh& mesh, const HiggsData& data, double R, const SolveOptions& opts, MetricField field) {
  const int n = mesh.num_vertices();
  const CoefficientFields coef = coefficients_at(data, mesh);
  RealField a2(n), b2(n);
  for (int i = 0; i < n; ++i) {
    a2[i] = std::norm(coef.alpha[i]);
    b2[i] = std::norm(coef.beta[i]);
  }
  const double r2 = R * R;
  const bool pin = r2 == 0.0;

  VortexSolution sol;
  SolveReport& rep = sol.report;
  RealField F = vortex_residual(mesh, data, R, field);
  double res = sup_norm(F);
  rep.residual_history.push_back(res);

  // -(1/4) W + diag(area * R^2 * (...)), symmetric positive definite for R > 0.
  Eigen::SparseMatrix<double> K = -0.25 * mesh.stiffness;
  K.makeCompressed();
  std::vector<double*> diag(n, nullptr);
  for (int col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it)
      if (it.row() == it.col()) diag[col] = &it.valueRef();
  const Eigen::SparseMatrix<double> K0 = K;
  if (pin) {
    for (int col = 0; col < K.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it)
        if (it.row() == 0 || it.col() == 0) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.analyzePattern(K);

  double last_step = std::numeric_limits<double>::infinity();
  while (true) {
    if (res <= opts.tolerance && last_step <= opts.tolerance) break;
    if (rep.iterations >= opts.max_iter) {
      rep.message = "iteration limit reached";
      break;
    }
    if (!pin) {
      for (int i = 0; i < n; ++i) {
        const double ep = field.weight_plus[i] * std::exp(2.0 * field.psi[i]);
        const double em = field.weight_minus[i] * std::exp(-2.0 * field.psi[i]);
        *diag[i] = K0.coeff(i, i) + mesh.vertex_area[i] * r2 * 2.0 * (a2[i] * ep + b2[i] * em);
      }
    }
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success) {
      rep.message = "Newton matrix factorization failed";
      break;
    }
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = mesh.vertex_area[i] * F[i];
    if (pin) rhs[0] = 0.0;
    const Eigen::VectorXd delta = ldlt.solve(rhs);

    double t = 1.0;
    bool accepted = false;
    MetricField trial = field;
    RealField Ft;
    while (t >= kMinDamping) {
      for (int i = 0; i < n; ++i) trial.psi[i] = field.psi[i] + t * delta[i];
      try {
        Ft = vortex_residual(mesh, data, R, trial);
        const double rt = sup_norm(Ft);
        if (rt <= (1.0 - kArmijo * t) * res) {
          accepted = true;
          break;
        }
      } catch (const DivergenceError&) {
      }
      t *= 0.5;
    }
    if (!accepted) {
      // At round-off level no step can reduce the residual further.
      if (res > opts.tolerance) rep.message = "line search failed";
      break;
    }
    last_step = t * delta.cwiseAbs().maxCoeff();
    field.psi.swap(trial.psi);
    F.swap(Ft);
    res = sup_norm(F);
    ++rep.iterations;
    rep.damping_history.push_back(t);
    rep.residual_history.push_back(res);
  }
  rep.final_residual_norm = res;
  rep.final_step_norm = std::isfinite(last_step) ? last_step : 0.0;
  rep.converged = res <= opts.tolerance;
  if (rep.converged) rep.message = "converged";
  sol.field = std::move(field);
  return sol;
}

}  // namespace

VortexSolution solve_vortex(const Mesh& mesh, const HiggsData& data, double R, const SolveOptions& opts) {
  if (!(R >= 0.0) || !std::isfinite(R)) throw PreconditionError("R must be a nonnegative real");
  if (R == 0.0 && data.family != Family::ZeroDegree)
    throw PreconditionError("R = 0 requires a degree-zero line bundle (flat metric)");
  if (!(opts.tolerance > 0.0) || opts.max_iter < 1) throw PreconditionError("invalid solver options");
  const double kappa = singular_coefficient_for(data);

  if (opts.initial) {
    MetricField init = *opts.initial;
    if (static_cast<int>(init.psi.size()) != mesh.num_vertices() || init.singular_coefficient != kappa)
      throw PreconditionError("initial field is incompatible with the mesh or family");
    return newton(mesh, data, R, opts, std::move(init));
  }
  MetricField zero = make_metric_field(mesh, kappa, opts.cutoff_radius);
  if (data.family == Family::Hitchin && !data.alpha_vanishes()) {
    // Continue from the q = 0 solution; fall back to psi = 0.
    HiggsData flat = HiggsData::hitchin(Complex{});
    VortexSolution base = newton(mesh, flat, R, opts, zero);
    if (base.report.converged) {
      VortexSolution sol = newton(mesh, data, R, opts, base.field);
      if (sol.report.converged) return sol;
    }
  }
  return newton(mesh, data, R, opts, std::move(zero));
}

RescaleReport rescale_check(const Mesh& mesh, const HiggsData& data, double R, const SolveOptions& opts) {
  if (!(R > 0.0)) throw PreconditionError("rescale_check needs R > 0");
  if (data.family != Family::Hitchin) throw PreconditionError("rescale_check applies to the Hitchin family");
  HiggsData scaled = data;
  if (scaled.sampled_q) {
    for (Complex& q : *scaled.sampled_q) q *= R * R;
  } else {
    scaled.c *= R * R;
  }
  const VortexSolution a = solve_vortex(mesh, data, R, opts);
  const VortexSolution b = solve_vortex(mesh, scaled, 1.0, opts);
  RescaleReport out;
  out.scaled = a.report;
  out.unscaled = b.report;
  const double shift = std::log(R);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    out.defect = std::max(out.defect, std::abs(a.field.phi(i) - (b.field.phi(i) + shift)));
  return out;
}

RealField gaussian_curvature(const Mesh& mesh, const MetricField& field) {
  const int n = mesh.num_vertices();
  RealField out(n, std::numeric_limits<double>::quiet_NaN());
  const SingularBackground bg = field.background_function();
  LocalJet jet;
  for (int i = 0; i < n; ++i) {
    if (!fit_jet(mesh, field.psi, i, 3, jet)) continue;
    const double lap = bg.laplacian(mesh.cone_distance[i]) + jet.laplacian;
    out[i] = std::exp(2.0 * field.phi(i)) * lap;
  }
  return out;
}

double total_curvature(const Mesh& mesh, const MetricField& field) {
  const RealField lpsi = laplacian_apply(mesh, field.psi);
  double s = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) s += mesh.vertex_area[i] * (field.source[i] + lpsi[i]);
  return s;
}

double metric_area(const Mesh& mesh, const MetricField& field) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const SingularBackground bg = field.background_function();
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    int apex = 0;
    for (int k = 0; k < 3; ++k)
      if (mesh.node_vertex[tr[k]] == mesh.cone_vertex) apex = k;
    const int ia = tr[apex], ib = tr[(apex + 1) % 3], ic = tr[(apex + 2) % 3];
    const Complex a = mesh.node_position[ia];
    const Complex eb = mesh.node_position[ib] - a, ec = mesh.node_position[ic] - a;
    const double pa = field.psi[mesh.node_vertex[ia]], pb = field.psi[mesh.node_vertex[ib]],
                 pc = field.psi[mesh.node_vertex[ic]];
    double acc = 0.0;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
      for (int si = -1; si <= 1; si += 2) {
        const double s = 0.5 * (1.0 + si * Rule::abscissa()[i]);
        const double u = s * s * s;
        for (std::size_t j = 0; j < Rule::abscissa().size(); ++j) {
          for (int sj = -1; sj <= 1; sj += 2) {
            const double v = 0.5 * (1.0 + sj * Rule::abscissa()[j]);
            const Complex x = a + u * ((1.0 - v) * eb + v * ec);
            const double psi = (1.0 - u) * pa + u * (1.0 - v) * pb + u * v * pc;
            const double phi = bg.value(mesh.distance_to_cone(x)) + psi;
            acc += 0.25 * Rule::weights()[i] * Rule::weights()[j] * std::exp(-2.0 * phi) * u * 3.0 * s * s;
          }
        }
      }
    }
    total += 2.0 * mesh.triangle_area(t) * acc;
  }
  return total;
}

}  // namespace higgslab
