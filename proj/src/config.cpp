#include "higgslab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

namespace higgslab {

namespace {

using nlohmann::json;
using boost::property_tree::ptree;

json value_at(const ptree& tree, const std::string& key) {
  const auto raw = tree.get_optional<std::string>(key);
  if (!raw) return json();
  try {
    return json::parse(*raw);
  } catch (const json::parse_error&) {
    // Bare words such as `hitchin` or `out/run1`.
    return json(*raw);
  }
}

Complex as_complex(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(key + ": expected a number or [re, im]");
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  return v.get<double>();
}

std::vector<double> as_reals(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_real(x, key));
  return out;
}

template <class T, class F>
void read_if(const ptree& tree, const std::string& key, T& target, F convert) {
  const json v = value_at(tree, key);
  if (!v.is_null()) target = convert(v, key);
}

}  // namespace

bool RunConfig::check_enabled(const std::string& name) const {
  return std::find(checks.begin(), checks.end(), "all") != checks.end() ||
         std::find(checks.begin(), checks.end(), name) != checks.end();
}

RunConfig parse_config(std::istream& in) {
  ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  read_if(tree, "surface.circumradius", cfg.circumradius, as_real);
  read_if(tree, "surface.target_edge_length", cfg.target_edge_length, as_real);
  read_if(tree, "surface.cone_grading", cfg.cone_grading, as_real);
  read_if(tree, "surface.cutoff_radius", cfg.cutoff_radius, as_real);

  std::string family = "hitchin";
  read_if(tree, "family.name", family, [](const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key + ": expected a name");
    return v.get<std::string>();
  });
  Complex c{0.0, 0.0}, k{1.0, 0.0};
  read_if(tree, "family.c", c, as_complex);
  read_if(tree, "family.k", k, as_complex);
  try {
    cfg.data = parse_family(family) == Family::Hitchin ? HiggsData::hitchin(c) : HiggsData::zero_degree(k, c);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("family: ") + e.what());
  }

  read_if(tree, "parameters.hbar", cfg.params.hbar, as_complex);
  read_if(tree, "parameters.R", cfg.params.R, as_real);
  read_if(tree, "parameters.R_list", cfg.R_list, as_reals);

  const json sweep_hbar = value_at(tree, "sweep.hbar");
  const json sweep_R = value_at(tree, "sweep.R");
  if (!sweep_hbar.is_null() || !sweep_R.is_null()) {
    std::vector<Complex> hbars;
    if (sweep_hbar.is_null()) {
      hbars.push_back(cfg.params.hbar);
    } else {
      if (!sweep_hbar.is_array()) throw ConfigError("sweep.hbar: expected an array");
      for (const auto& h : sweep_hbar) hbars.push_back(as_complex(h, "sweep.hbar"));
    }
    const std::vector<double> Rs = sweep_R.is_null() ? std::vector<double>{cfg.params.R} : as_reals(sweep_R, "sweep.R");
    for (const Complex& h : hbars)
      for (double R : Rs) cfg.grid.push_back({h, R});
  }

  read_if(tree, "solver.tolerance", cfg.tolerance, as_real);
  double max_iter = cfg.max_iter;
  read_if(tree, "solver.max_iter", max_iter, as_real);
  cfg.max_iter = static_cast<int>(max_iter);

  read_if(tree, "output.directory", cfg.output_dir, [](const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key + ": expected a path");
    return v.get<std::string>();
  });
  const json checks = value_at(tree, "checks.run");
  if (checks.is_string()) {
    cfg.checks = {checks.get<std::string>()};
  } else if (checks.is_array()) {
    cfg.checks.clear();
    for (const auto& x : checks) {
      if (!x.is_string()) throw ConfigError("checks.run: expected names");
      cfg.checks.push_back(x.get<std::string>());
    }
  } else if (!checks.is_null()) {
    throw ConfigError("checks.run: expected a name or a list of names");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in);
}

void validate_config(const RunConfig& cfg, bool check_point) {
  if (!(cfg.circumradius > 0.0)) throw ConfigError("surface.circumradius must be positive");
  if (!(cfg.target_edge_length > 0.0)) throw ConfigError("surface.target_edge_length must be positive");
  if (!(cfg.cone_grading > 0.0 && cfg.cone_grading <= 1.0)) throw ConfigError("surface.cone_grading must lie in (0, 1]");
  // Generator chords pass at half an edge from the cone; the guard must fit.
  const double chord_clearance = cfg.circumradius * std::sin(kPi / 8.0);
  if (!(cfg.cutoff_radius > 0.0 && 3.0 * cfg.cutoff_radius < chord_clearance))
    throw ConfigError("surface.cutoff_radius must be positive and below circumradius * sin(pi/8) / 3");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("solver.tolerance must be positive");
  if (cfg.max_iter < 1) throw ConfigError("solver.max_iter must be at least 1");
  if (cfg.output_dir.empty()) throw ConfigError("output.directory must not be empty");
  if (check_point && !admissible(cfg.params, cfg.data)) throw ConfigError("inadmissible parameters");
  for (std::size_t i = 0; i < cfg.R_list.size(); ++i) {
    if (!(cfg.R_list[i] > 0.0)) throw ConfigError("parameters.R_list must be positive");
    if (i && !(cfg.R_list[i] < cfg.R_list[i - 1])) throw ConfigError("parameters.R_list must be strictly decreasing");
    if (!admissible({cfg.params.hbar, cfg.R_list[i]}, cfg.data)) throw ConfigError("inadmissible parameters");
  }
  for (const Parameters& p : cfg.grid)
    if (!admissible(p, cfg.data)) throw ConfigError("inadmissible parameters");
}

void apply_mesh_level(RunConfig& cfg, int level) {
  if (level < 0) throw ConfigError("mesh level must be non-negative");
  cfg.target_edge_length = std::ldexp(cfg.target_edge_length, -level);
}

}  // namespace higgslab
