#include <algorithm>
#include <cmath>

#include "higgslab/connection.hpp"

namespace higgslab {

namespace {

double cross2(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot2(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

double segment_point_distance(Complex a, Complex b, Complex p) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  double s = len2 > 0.0 ? dot2(p - a, d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(a + s * d - p);
}

Mat2 inverse(const Mat2& m) {
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r / m.determinant();
}

bool constant_coefficients(const ConnectionField& conn) {
  if (conn.field.singular_coefficient != 0.0 || conn.data.sampled_q) return false;
  for (std::size_t i = 1; i < conn.M.size(); ++i) {
    if ((conn.M[i] - conn.M[0]).cwiseAbs().maxCoeff() > 1e-12) return false;
    if ((conn.N[i] - conn.N[0]).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

// One RK4 step of Y' = Y A(s).
template <class F>
Mat2 rk4(const Mat2& Y, double s, double h, F A) {
  const Mat2 A0 = A(s), A1 = A(s + 0.5 * h), A2 = A(s + h);
  const Mat2 k1 = Y * A0;
  const Mat2 k2 = (Y + 0.5 * h * k1) * A1;
  const Mat2 k3 = (Y + 0.5 * h * k2) * A1;
  const Mat2 k4 = (Y + h * k3) * A2;
  return Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Adaptive RK4 with step doubling over [s0, s1].
template <class F>
Mat2 integrate_adaptive(Mat2 Y, double s0, double s1, F A, double tol, int& steps) {
  double s = s0;
  double h = s1 - s0;
  int guard = 0;
  while (s < s1) {
    if (++guard > 1000000) throw std::runtime_error("transport step control failed");
    h = std::min(h, s1 - s);
    const Mat2 full = rk4(Y, s, h, A);
    const Mat2 half = rk4(rk4(Y, s, 0.5 * h, A), s + 0.5 * h, 0.5 * h, A);
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    if (err <= tol || h < 1e-14) {
      Y = half + (half - full) / 15.0;
      s += h;
      ++steps;
      const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
      h *= std::clamp(grow, 0.2, 4.0);
    } else {
      h *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.1, 0.5);
    }
  }
  return Y;
}

}  // namespace

Mat2 expm_traceless(const Mat2& A) {
  const Complex s = std::sqrt(-A.determinant());
  const Complex sinhc = std::abs(s) < 1e-8 ? Complex(1.0) + s * s / 6.0 : std::sinh(s) / s;
  return std::cosh(s) * Mat2::Identity() + sinhc * A;
}

Path developed_path(const TranslationSurface& surface, Complex start, const std::vector<Complex>& displacements) {
  const int n = surface.num_edges();
  Path path;
  Complex p = start;
  for (const Complex& disp : displacements) {
    Complex d = disp;
    int guard = 0;
    while (std::abs(d) > 0.0) {
      if (++guard > 1000) throw PathError("developed path does not terminate");
      double s_exit = std::numeric_limits<double>::infinity();
      int exit_edge = -1;
      for (int e = 0; e < n; ++e) {
        const Complex outward = -kI * (surface.edge_end(e) - surface.edge_start(e));
        const double rate = dot2(d, outward);
        if (rate <= 0.0) continue;
        const double s = dot2(surface.edge_start(e) - p, outward) / rate;
        if (s < s_exit) {
          s_exit = s;
          exit_edge = e;
        }
      }
      if (exit_edge < 0 || s_exit < -1e-12) throw PathError("path start lies outside the polygon");
      if (s_exit >= 1.0) {
        path.pieces.emplace_back(p, p + d);
        p += d;
        break;
      }
      const Complex q = p + s_exit * d;
      path.pieces.emplace_back(p, q);
      const Complex shift = -surface.translation_onto(exit_edge);
      path.crossings.push_back({exit_edge, shift});
      p = q + shift;
      d *= (1.0 - s_exit);
    }
  }
  double clearance = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : path.pieces)
    for (const Complex& c : surface.polygon_vertices) clearance = std::min(clearance, segment_point_distance(a, b, c));
  path.clearance = clearance;
  return path;
}

TransportResult transport(const ConnectionField& conn, const Path& path, const Mesh& mesh, const TransportOptions& opts) {
  if (!(path.clearance > opts.guard_radius))
    throw PathError("path enters the cone guard disk (clearance " + std::to_string(path.clearance) + ")");
  TransportResult out;
  Mat2 Y = Mat2::Identity();
  if (constant_coefficients(conn)) {
    const Mat2& M = conn.M[0];
    const Mat2& N = conn.N[0];
    for (const auto& [a, b] : path.pieces) {
      const Complex dz = b - a;
      Y = Y * expm_traceless(M * dz + N * std::conj(dz));
      ++out.steps;
    }
  } else {
    for (const auto& [a, b] : path.pieces) {
      const Complex dz = b - a;
      const double len = std::abs(dz);
      if (len == 0.0) continue;
      const double nudge = 1e-9 * mesh.max_edge_length() / len;
      double s = 0.0;
      int guard = 0;
      while (s < 1.0) {
        if (++guard > 10 * mesh.num_triangles()) throw PathError("triangle walk did not terminate");
        std::array<double, 3> lam{};
        auto tri = mesh.locate(a + std::min(s + nudge, 1.0) * dz, &lam);
        if (!tri) tri = mesh.locate(a + s * dz, &lam);
        if (!tri) throw PathError("path leaves the triangulated polygon");
        const int t = *tri;
        // Barycentrics along the segment are affine in s; find where one hits 0.
        const auto& tr = mesh.triangles[t];
        const Complex p0 = mesh.node_position[tr[0]], p1 = mesh.node_position[tr[1]], p2 = mesh.node_position[tr[2]];
        const double area2 = cross2(p1 - p0, p2 - p0);
        auto bary = [&](Complex x) {
          return std::array<double, 3>{cross2(p1 - x, p2 - x) / area2, cross2(p2 - x, p0 - x) / area2,
                                       cross2(p0 - x, p1 - x) / area2};
        };
        const auto l0 = bary(a + s * dz), l1 = bary(b);
        double s_exit = 1.0;
        for (int k = 0; k < 3; ++k) {
          const double slope = (l1[k] - l0[k]) / (1.0 - s);
          if (slope >= 0.0) continue;
          s_exit = std::min(s_exit, s + std::max(l0[k], 0.0) / -slope);
        }
        s_exit = std::max(s_exit, std::min(s + nudge, 1.0));
        auto A = [&](double u) {
          const ConnectionSample cs = connection_in_triangle(conn, mesh, t, a + u * dz);
          return Mat2(cs.M * dz + cs.N * std::conj(dz));
        };
        Y = integrate_adaptive(Y, s, s_exit, A, opts.tolerance, out.steps);
        s = s_exit;
      }
    }
  }
  const Complex det = Y.determinant();
  out.det_drift = std::abs(det - 1.0);
  out.value = Y / std::sqrt(det);
  return out;
}

std::vector<Path> generator_chords(const TranslationSurface& surface, Complex base) {
  std::vector<Path> out;
  for (int j = 0; j < surface.num_edges() / 2; ++j) out.push_back(developed_path(surface, base, {surface.translation_onto(j)}));
  return out;
}

double relation_defect(const std::vector<Sl2>& g) {
  if (g.size() != 4) throw PreconditionError("relation needs four generators");
  const Mat2 w = g[0] * g[1] * inverse(g[0]) * inverse(g[1]) * g[2] * g[3] * inverse(g[2]) * inverse(g[3]);
  return (w - Mat2::Identity()).norm();
}

HolonomyReport holonomy_generators(const ConnectionField& conn, const TranslationSurface& surface, const Mesh& mesh,
                                   const TransportOptions& opts, Complex base) {
  if (surface.num_edges() != 8) throw PreconditionError("generator words are defined for the octagon");
  HolonomyReport rep;
  rep.clearance = std::numeric_limits<double>::infinity();
  for (const Path& p : generator_chords(surface, base)) {
    const TransportResult r = transport(conn, p, mesh, opts);
    rep.chords.push_back(r.value);
    rep.max_det_drift = std::max(rep.max_det_drift, r.det_drift);
    rep.clearance = std::min(rep.clearance, p.clearance);
  }
  const auto& c = rep.chords;
  rep.generators = {c[0], inverse(c[1]), inverse(c[1]) * c[0] * c[2], inverse(c[3]) * c[2]};
  for (const Mat2& g : rep.generators) rep.traces.push_back(g.trace());
  rep.relation_defect = relation_defect(rep.generators);
  return rep;
}

}  // namespace higgslab
