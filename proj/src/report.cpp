#include "higgslab/report.hpp"

#include <cmath>
#include <cstdio>

namespace higgslab {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_json(const Mat2& m) {
  Json out = Json::array();
  for (int r = 0; r < 2; ++r) out.push_back(Json::array({complex_json(m(r, 0)), complex_json(m(r, 1))}));
  return out;
}

Json solve_report_json(const SolveReport& r) {
  return Json{{"converged", r.converged},
              {"iterations", r.iterations},
              {"final_residual_norm", r.final_residual_norm},
              {"final_step_norm", r.final_step_norm},
              {"damping_history", r.damping_history},
              {"residual_history", r.residual_history},
              {"message", r.message}};
}

Json holonomy_json(const HolonomyReport& h) {
  static const char* names[] = {"A1", "B1", "A2", "B2"};
  Json gens = Json::object();
  Json traces = Json::object();
  for (std::size_t i = 0; i < h.generators.size(); ++i) {
    gens[names[i]] = matrix_json(h.generators[i]);
    traces[names[i]] = complex_json(h.traces[i]);
  }
  return Json{{"generators", gens},
              {"traces", traces},
              {"relation_defect", h.relation_defect},
              {"determinant_drift", h.max_det_drift},
              {"clearance", h.clearance}};
}

Json reality_json(const RealityResidual& r, const HolonomyRealityReport& h, double min_angle) {
  Json words = Json::array();
  for (const auto& w : h.words) words.push_back(Json{{"word", w.word}, {"imag_trace", w.trace.imag()}});
  return Json{{"preservation_residual", r.preservation_sup},
              {"gradient_residual", r.gradient_sup},
              {"generator_imag_trace", h.generator_imag},
              {"word_imag_trace", h.word_imag},
              {"conjugator_found", h.conjugator_found},
              {"conjugated_imag_mass", h.conjugated_imag},
              {"commutation_residual", h.commutation_residual},
              {"min_fixed_line_angle", min_angle},
              {"words", words}};
}

void write_field_csv(std::ostream& out, const Mesh& mesh, const MetricField& field, const RealField& residual) {
  out << "vertex_id,x,y,phi,psi,residual\n";
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Complex p = mesh.vertex_position[i];
    out << i << ',' << format_number(p.real()) << ',' << format_number(p.imag()) << ',' << format_number(field.phi(i))
        << ',' << format_number(field.psi[i]) << ',' << format_number(residual.empty() ? 0.0 : residual[i]) << '\n';
  }
}

void write_beltrami_csv(std::ostream& out, const BeltramiField& mu) {
  out << "vertex_id,re_mu,im_mu,abs_mu\n";
  for (std::size_t i = 0; i < mu.mu.size(); ++i)
    out << i << ',' << format_number(mu.mu[i].real()) << ',' << format_number(mu.mu[i].imag()) << ','
        << format_number(std::abs(mu.mu[i])) << '\n';
}

void write_face_csv(std::ostream& out, const RealField& face_values, const std::string& column) {
  out << "triangle_id," << column << '\n';
  for (std::size_t t = 0; t < face_values.size(); ++t) out << t << ',' << format_number(face_values[t]) << '\n';
}

void write_convergence_csv(std::ostream& out, const std::vector<LimitRow>& rows) {
  out << "R,distance,lower_left_dzbar\n";
  for (const auto& r : rows)
    out << format_number(r.R) << ',' << format_number(r.distance) << ',' << format_number(r.lower_left_dzbar) << '\n';
}

}  // namespace higgslab
