#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "higgslab/higgs.hpp"
#include "higgslab/types.hpp"

namespace higgslab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// INI sections; values are JSON (complex numbers as [re, im]):
//
//   [surface]    circumradius, target_edge_length, cone_grading, cutoff_radius
//   [family]     name = hitchin | zero_degree, c, k
//   [parameters] hbar, R, R_list
//   [sweep]      hbar = [[re, im], ...], R = [...]   (grid ordered hbar-major)
//   [solver]     tolerance, max_iter
//   [output]     directory
//   [checks]     run = "all" or ["name", ...]
struct RunConfig {
  double circumradius = 1.0;
  double target_edge_length = 0.1;
  double cone_grading = 0.75;
  double cutoff_radius = 0.12;

  HiggsData data;
  Parameters params;
  std::vector<double> R_list;
  std::vector<Parameters> grid;

  double tolerance = 1e-10;
  int max_iter = 50;

  std::string output_dir = "out";
  std::vector<std::string> checks{"all"};

  double guard_radius() const { return 3.0 * cutoff_radius; }
  bool check_enabled(const std::string& name) const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Throws ConfigError naming the first problem; admissibility included.
// Commands that never use [parameters] (mesh, sweep) pass check_point = false.
void validate_config(const RunConfig& cfg, bool check_point = true);

// Halves target_edge_length `level` times.
void apply_mesh_level(RunConfig& cfg, int level);

}  // namespace higgslab
