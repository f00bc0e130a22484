#include "higgslab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <thread>

#include "higgslab/connection.hpp"
#include "higgslab/quasiconformal.hpp"
#include "higgslab/reality.hpp"
#include "higgslab/surface.hpp"
#include "higgslab/vortex.hpp"

namespace higgslab {

namespace fs = std::filesystem;

namespace {

// Curvature residual above this (outside the guard) flags an unsolved Hitchin field.
constexpr double kHitchinCurvatureFlag = 0.05;

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Complex invariant_of(const HiggsData& data, const Parameters& p) {
  const Complex h2 = p.hbar * p.hbar;
  return data.family == Family::ZeroDegree ? h2 * p.R * p.R : h2 * std::pow(p.R, 4);
}

bool on_reality_locus(const Parameters& p) { return std::abs(std::norm(p.hbar) * p.R * p.R - 1.0) <= 1e-12; }

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.tolerance = cfg.tolerance;
  o.max_iter = cfg.max_iter;
  o.cutoff_radius = cfg.cutoff_radius;
  return o;
}

VortexSolution solve_or_throw(const Mesh& mesh, const HiggsData& data, double R, const SolveOptions& opts) {
  VortexSolution s = solve_vortex(mesh, data, R, opts);
  if (!s.report.converged) throw SolverFailure("vortex solve did not converge: " + s.report.message);
  return s;
}

class Runner {
 public:
  explicit Runner(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.output_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    std::ofstream probe(dir_ / ".write_probe");
    if (ec || !probe) throw ConfigError("output directory is not writable: " + cfg.output_dir);
    probe.close();
    fs::remove(dir_ / ".write_probe", ec);
    summary_["family"] = family_name(cfg.data.family);
    summary_["hbar"] = complex_json(cfg.params.hbar);
    summary_["R"] = cfg.params.R;
  }

  void mesh() {
    if (mesh_) return;
    surface_ = build_octagon_surface(cfg_.circumradius);
    mesh_ = triangulate(surface_, cfg_.target_edge_length, cfg_.cone_grading);
    std::ofstream vert(dir_ / "mesh_vertices.csv");
    write_mesh_vertices_csv(vert, *mesh_);
    std::ofstream tri(dir_ / "mesh_triangles.csv");
    write_mesh_triangles_csv(tri, *mesh_);
    std::ofstream surf(dir_ / "surface.ini");
    write_surface_config(surf, surface_);
    summary_["mesh"] = Json{{"vertices", mesh_->num_vertices()},
                            {"triangles", mesh_->num_triangles()},
                            {"euler_characteristic", mesh_->euler_characteristic()},
                            {"cone_angle", mesh_->cone_angle_sum()},
                            {"target_edge_length", cfg_.target_edge_length},
                            {"delaunay_flips", mesh_->flips}};
  }

  void solve() {
    if (sol_) return;
    mesh();
    sol_ = solve_or_throw(*mesh_, cfg_.data, cfg_.params.R, solve_options(cfg_));
    const RealField res = vortex_residual(*mesh_, cfg_.data, cfg_.params.R, sol_->field);
    std::ofstream f(dir_ / "field.csv");
    write_field_csv(f, *mesh_, sol_->field, res);
    Json s = solve_report_json(sol_->report);
    s["metric_area"] = metric_area(*mesh_, sol_->field);
    s["total_curvature"] = total_curvature(*mesh_, sol_->field);
    if (cfg_.data.family == Family::ZeroDegree) {
      double dev = 0.0;
      const double exact = -0.5 * std::log(std::abs(cfg_.data.k));
      for (int i = 0; i < mesh_->num_vertices(); ++i) dev = std::max(dev, std::abs(sol_->field.phi(i) - exact));
      s["exact_deviation"] = dev;
      check("exact_solution", dev, 1e-9, dev <= 1e-9);
    } else if (cfg_.data.alpha_vanishes() && cfg_.params.R == 1.0) {
      const double k_dev = curvature_deviation(sol_->field);
      const double gb = std::abs(s["total_curvature"].get<double>() / (-4.0 * kPi) - 1.0);
      s["curvature_deviation"] = k_dev;
      s["gauss_bonnet_deviation"] = gb;
      check("calibration_curvature", k_dev, 0.02, k_dev <= 0.02);
      check("calibration_gauss_bonnet", gb, 0.02, gb <= 0.02);
    }
    summary_["solve"] = s;
  }

  void family() {
    if (conn_) return;
    solve();
    conn_ = assemble_connection(*mesh_, cfg_.data, cfg_.params, sol_->field);
    const CurvatureResidual cr = curvature_residual(*conn_, *mesh_);
    std::ofstream f(dir_ / "curvature.csv");
    write_face_csv(f, cr.face_norm, "curvature_norm");
    const double all = sup_outside(*mesh_, cr.face_norm, 0.0);
    const double outside = sup_outside(*mesh_, cr.face_norm, cfg_.guard_radius());
    summary_["flatness"] = Json{{"curvature_sup", all},
                              {"curvature_sup_outside_guard", outside},
                              {"guard_radius", cfg_.guard_radius()},
                              {"fallback_vertices", conn_->fallback_vertices},
                              {"frame", conn_->frame_note}};
    if (cfg_.data.family == Family::ZeroDegree)
      check("curvature", all, 1e-12, all <= 1e-12);
    else
      check("curvature", outside, kHitchinCurvatureFlag, outside <= kHitchinCurvatureFlag);
  }

  void holonomy() {
    if (hol_) return;
    family();
    hol_ = holonomy_generators(*conn_, surface_, *mesh_, {1e-10, cfg_.guard_radius()});
    std::ofstream(dir_ / "holonomy.json") << holonomy_json(*hol_).dump(2) << '\n';
    summary_["holonomy"] = Json{{"relation_defect", hol_->relation_defect}, {"determinant_drift", hol_->max_det_drift}};
    const double bound = cfg_.data.family == Family::ZeroDegree ? 1e-8 : 1e-5;
    check("relation", hol_->relation_defect, bound, hol_->relation_defect <= bound);
    check("determinant", hol_->max_det_drift, 1e-9, hol_->max_det_drift <= 1e-9);
  }

  void limit() {
    if (cfg_.R_list.empty()) throw ConfigError("parameters.R_list is required for the conformal limit");
    mesh();
    const ConformalLimitResult lim =
        conformal_limit(*mesh_, cfg_.data, cfg_.params.hbar, cfg_.R_list, solve_options(cfg_), cfg_.guard_radius());
    std::ofstream f(dir_ / "convergence.csv");
    write_convergence_csv(f, lim.table);
    have_convergence_ = true;
    Json s{{"slope", lim.slope},
           {"independent_defect", lim.independent_defect},
           {"limit_lower_left_dzbar", lim.transversality},
           {"monotone", lim.monotone}};
    std::ofstream(dir_ / "limit.json") << s.dump(2) << '\n';
    summary_["limit"] = s;
    if (cfg_.R_list.size() >= 2) check("slope", std::abs(lim.slope - 4.0), 0.2, std::abs(lim.slope - 4.0) <= 0.2);
    check("limit_match", lim.independent_defect, 10.0 * cfg_.tolerance, lim.independent_defect <= 10.0 * cfg_.tolerance);
    check("limit_transversality", lim.transversality, 1e-13, lim.transversality <= 1e-13);
    check("monotone", lim.monotone ? 0.0 : 1.0, 0.0, lim.monotone);
  }

  void beltrami_checks() {
    if (mu_) return;
    solve();
    const auto& field = sol_->field;
    mu_ = beltrami(*mesh_, cfg_.data, cfg_.params, field);
    std::ofstream f(dir_ / "beltrami.csv");
    write_beltrami_csv(f, *mu_);
    const double t = std::abs(cfg_.params.hbar * cfg_.params.hbar) * cfg_.params.R * cfg_.params.R;
    Json s{{"sup_norm", mu_->sup_norm},
           {"argmax_vertex", mu_->argmax},
           {"invariant", complex_json(invariant_of(cfg_.data, cfg_.params))}};
    check("beltrami_bound", mu_->sup_norm, 1.0, mu_->sup_norm < 1.0);

    const ExtensionClassField ext = extension_class(*mesh_, cfg_.data, cfg_.params, field, *mu_);
    s["extension_disagreement"] = ext.max_disagreement;
    check("extension", ext.max_disagreement, 1e-10, ext.max_disagreement <= 1e-10);
    const double trans = sup_norm(oper_transversality(*mesh_, cfg_.data, cfg_.params, field, *mu_));
    s["transversality"] = trans;

    if (cfg_.data.family == Family::ZeroDegree) {
      const double modulus = std::abs(mu_->sup_norm - t);
      check("beltrami_modulus", modulus, 1e-12, modulus <= 1e-12);
      const double omega = sup_norm(ext.omega_coeff);
      s["extension_sup"] = omega;
      check("extension_trivial", omega, 1e-12, omega <= 1e-12);
      check("transversality", trans, 1e-13, trans <= 1e-13);
      if (t < 1.0) {
        const TeichmullerReport tr = teichmuller_form_check(*mu_, cfg_.data, cfg_.params);
        s["teichmuller"] = Json{{"t", tr.t}, {"distance", tr.distance}, {"defect", tr.defect}};
        check("teichmuller", tr.defect, 1e-12, tr.defect <= 1e-12);
      }
    } else {
      check("transversality", trans, 10.0 * cfg_.tolerance, trans <= 10.0 * cfg_.tolerance);
      if (!cfg_.data.alpha_vanishes()) sinh_gordon(s);
    }
    std::ofstream(dir_ / "beltrami.json") << s.dump(2) << '\n';
    summary_["beltrami"] = s;
  }

  void reality() {
    holonomy();
    const RealStructure rs = make_real_structure(*mesh_, sol_->field);
    const RealityResidual rr = reality_residual(*conn_, rs, *mesh_, cfg_.guard_radius());
    const HolonomyRealityReport hr = holonomy_reality_check(hol_->generators);
    const double angle = min_fixed_line_angle(*mesh_, sol_->field);
    Json s = reality_json(rr, hr, angle);
    s["on_reality_locus"] = on_reality_locus(cfg_.params);
    std::ofstream(dir_ / "reality.json") << s.dump(2) << '\n';
    s.erase("words");
    summary_["reality"] = s;
    if (on_reality_locus(cfg_.params)) {
      check("reality_preservation", rr.preservation_sup, 1e-12, rr.preservation_sup <= 1e-12);
      const double bound = cfg_.data.family == Family::ZeroDegree ? 1e-8 : 1e-5;
      check("reality_trace", hr.generator_imag, bound, hr.generator_imag <= bound);
      check("fixed_line_angle", angle, 0.0, angle > 0.0);
    }
  }

  void plot_data() {
    std::ofstream f(dir_ / "plot_data.csv");
    f << "x,y,phi,abs_mu,residual\n";
    const RealField res = vortex_residual(*mesh_, cfg_.data, cfg_.params.R, sol_->field);
    for (int i = 0; i < mesh_->num_vertices(); ++i) {
      const Complex p = mesh_->vertex_position[i];
      f << format_number(p.real()) << ',' << format_number(p.imag()) << ',' << format_number(sol_->field.phi(i)) << ','
        << format_number(mu_ ? std::abs(mu_->mu[i]) : 0.0) << ',' << format_number(res[i]) << '\n';
    }
    std::ofstream g(dir_ / "plots.gp");
    write_plot_script(g, have_convergence_);
  }

  void sweep() {
    const std::vector<SweepRow> rows = run_sweep(cfg_);
    std::ofstream f(dir_ / "sweep.csv");
    write_sweep_csv(f, rows);
    int failures = 0;
    double worst_mu = 0.0, worst_modulus = 0.0;
    for (const auto& r : rows) {
      if (!r.ok) {
        ++failures;
        continue;
      }
      worst_mu = std::max(worst_mu, r.sup_mu);
      const double t = std::abs(r.params.hbar * r.params.hbar) * r.params.R * r.params.R;
      worst_modulus = std::max(worst_modulus, std::abs(r.sup_mu - t));
    }
    summary_["sweep"] = Json{{"points", rows.size()}, {"failed_points", failures}, {"max_sup_mu", worst_mu}};
    if (!rows.empty()) check("beltrami_bound", worst_mu, 1.0, worst_mu < 1.0);
    if (!rows.empty() && cfg_.data.family == Family::ZeroDegree)
      check("beltrami_modulus", worst_modulus, 1e-12, worst_modulus <= 1e-12);
    sweep_failures_ = failures;
  }

  RunOutcome finish(const std::string& command) {
    RunOutcome out;
    Json checks = Json::array();
    for (const auto& c : checks_) {
      checks.push_back(Json{{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
      if (!c.passed && out.message.empty()) out.message = c.name;
    }
    summary_["command"] = command;
    summary_["checks"] = checks;
    if (!out.message.empty()) {
      out.exit_code = kExitInvariantViolation;
    } else if (sweep_failures_ > 0) {
      out.exit_code = kExitSolverFailure;
      out.message = "sweep points failed";
    }
    summary_["status"] = out.exit_code == kExitOk ? "ok" : "failed";
    summary_["first_failure"] = out.message;
    std::ofstream(dir_ / "summary.json") << summary_.dump(2) << '\n';
    out.summary = summary_;
    out.checks = checks_;
    return out;
  }

 private:
  void check(const std::string& name, double value, double bound, bool passed) {
    if (!cfg_.check_enabled(name)) return;
    checks_.push_back({name, value, bound, passed});
  }

  double curvature_deviation(const MetricField& field) const {
    const RealField K = gaussian_curvature(*mesh_, field);
    double dev = 0.0;
    for (int i = 0; i < mesh_->num_vertices(); ++i)
      if (mesh_->cone_distance[i] >= cfg_.guard_radius() && std::isfinite(K[i]))
        dev = std::max(dev, std::abs(K[i] / -4.0 - 1.0));
    return dev;
  }

  void sinh_gordon(Json& s) {
    const VortexSolution ref = solve_or_throw(*mesh_, HiggsData::hitchin(Complex{}), 1.0, solve_options(cfg_));
    const double k_dev = curvature_deviation(ref.field);
    check("reference_curvature", k_dev, 0.02, k_dev <= 0.02);
    const RealField res = sinh_gordon_residual(*mesh_, cfg_.data, cfg_.params.R, sol_->field, ref.field, cfg_.guard_radius());
    const RealField u = sinh_gordon_u(*mesh_, cfg_.data, sol_->field);
    double sup = 0.0, umax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < mesh_->num_vertices(); ++i) {
      if (std::isnan(res[i])) continue;
      sup = std::max(sup, std::abs(res[i]));
      umax = std::max(umax, u[i]);
    }
    s["sinh_gordon_residual"] = sup;
    s["sinh_gordon_max_u"] = umax;
    check("sinh_gordon_sign", umax, 0.0, umax < 0.0);
  }

  const RunConfig& cfg_;
  fs::path dir_;
  TranslationSurface surface_;
  std::optional<Mesh> mesh_;
  std::optional<VortexSolution> sol_;
  std::optional<ConnectionField> conn_;
  std::optional<HolonomyReport> hol_;
  std::optional<BeltramiField> mu_;
  bool have_convergence_ = false;
  int sweep_failures_ = 0;
  Json summary_;
  std::vector<CheckResult> checks_;
};

SweepRow sweep_point(const TranslationSurface& surface, const Mesh& mesh, const RunConfig& cfg, const Parameters& p) {
  SweepRow row;
  row.params = p;
  row.invariant = invariant_of(cfg.data, p);
  try {
    const VortexSolution sol = solve_or_throw(mesh, cfg.data, p.R, solve_options(cfg));
    row.sup_mu = beltrami(mesh, cfg.data, p, sol.field).sup_norm;
    const ConnectionField conn = assemble_connection(mesh, cfg.data, p, sol.field);
    row.curvature_residual = sup_outside(mesh, curvature_residual(conn, mesh).face_norm, cfg.guard_radius());
    row.relation_defect = holonomy_generators(conn, surface, mesh, {1e-10, cfg.guard_radius()}).relation_defect;
    row.reality_residual =
        reality_residual(conn, make_real_structure(mesh, sol.field), mesh, cfg.guard_radius()).preservation_sup;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  std::vector<SweepRow> rows;
  if (cfg.grid.empty()) return rows;
  const TranslationSurface surface = build_octagon_surface(cfg.circumradius);
  const Mesh mesh = triangulate(surface, cfg.target_edge_length, cfg.cone_grading);
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < cfg.grid.size(); start += width) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t i = start; i < std::min(cfg.grid.size(), start + width); ++i)
      batch.push_back(std::async(std::launch::async, sweep_point, std::cref(surface), std::cref(mesh), std::cref(cfg),
                                 cfg.grid[i]));
    for (auto& f : batch) rows.push_back(f.get());
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "index,hbar_re,hbar_im,R,status,sup_mu,relation_defect,reality_residual,curvature_residual,invariant_re,"
         "invariant_im\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    out << i << ',' << format_number(r.params.hbar.real()) << ',' << format_number(r.params.hbar.imag()) << ','
        << format_number(r.params.R) << ',' << (r.ok ? "ok" : "failed") << ',' << format_number(r.sup_mu) << ','
        << format_number(r.relation_defect) << ',' << format_number(r.reality_residual) << ','
        << format_number(r.curvature_residual) << ',' << format_number(r.invariant.real()) << ','
        << format_number(r.invariant.imag()) << '\n';
  }
}

void write_plot_script(std::ostream& out, bool with_convergence) {
  out << "set datafile separator ','\n"
         "set terminal pngcairo size 900,800\n"
         "set size ratio -1\n"
         "set key off\n"
         "set palette rgbformulae 33,13,10\n";
  const char* maps[][2] = {{"phi", "3"}, {"abs_mu", "4"}, {"residual", "5"}};
  for (const auto& m : maps)
    out << "set output '" << m[0] << ".png'\nset title '" << m[0] << "'\n"
        << "plot 'plot_data.csv' every ::1 using 1:2:" << m[1] << " with points pt 7 ps 0.4 palette\n";
  if (with_convergence)
    out << "set size noratio\nset logscale xy\nset output 'convergence.png'\nset title 'lower-left dzbar vs R'\n"
           "f(x) = a + b * x\nfit f(x) 'convergence.csv' every ::1 using (log($1)):(log($3)) via a, b\n"
           "plot 'convergence.csv' every ::1 using 1:3 with linespoints pt 7, exp(a) * x**b\n";
}

RunOutcome run_command(const std::string& command, const RunConfig& cfg) {
  static const std::vector<std::string> known = {"mesh",     "solve",   "family", "holonomy", "limit",
                                                 "beltrami", "reality", "sweep",  "report"};
  RunOutcome out;
  try {
    if (std::find(known.begin(), known.end(), command) == known.end())
      throw ConfigError("unknown command '" + command + "'");
    validate_config(cfg, command != "mesh" && command != "sweep");
    Runner run(cfg);
    if (command == "mesh") {
      run.mesh();
    } else if (command == "solve") {
      run.solve();
    } else if (command == "family") {
      run.family();
    } else if (command == "holonomy") {
      run.holonomy();
    } else if (command == "limit") {
      run.limit();
    } else if (command == "beltrami") {
      run.beltrami_checks();
    } else if (command == "reality") {
      run.reality();
    } else if (command == "sweep") {
      run.sweep();
    } else {
      run.beltrami_checks();
      run.reality();
      if (!cfg.R_list.empty()) run.limit();
      run.plot_data();
    }
    return run.finish(command);
  } catch (const ConfigError& e) {
    out.exit_code = kExitInvalidConfig;
    out.message = e.what();
  } catch (const PreconditionError& e) {
    out.exit_code = kExitInvalidConfig;
    out.message = e.what();
  } catch (const SolverFailure& e) {
    out.exit_code = kExitSolverFailure;
    out.message = e.what();
  } catch (const DivergenceError& e) {
    out.exit_code = kExitSolverFailure;
    out.message = e.what();
  } catch (const MeshError& e) {
    out.exit_code = kExitSolverFailure;
    out.message = e.what();
  } catch (const PathError& e) {
    out.exit_code = kExitInvariantViolation;
    out.message = e.what();
  }
  return out;
}

}  // namespace higgslab
