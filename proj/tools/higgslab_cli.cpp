#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "higgslab/experiment.hpp"

using namespace higgslab;

int main(int argc, char** argv) {
  CLI::App app{"Higgs bundle numerics on the regular octagon surface"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::string checks;
  int mesh_level = -1;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"mesh", "triangulate the surface and write the mesh"},
      {"solve", "solve the R-scaled vortex equation"},
      {"family", "assemble the flat connection and check flatness"},
      {"holonomy", "holonomy of the generator loops"},
      {"limit", "conformal limit and its convergence table"},
      {"beltrami", "Beltrami differential, extension class and transversality"},
      {"reality", "real-structure residual and holonomy reality"},
      {"sweep", "(hbar, R) grid sweep"},
      {"report", "all checks plus plot data and script"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI run configuration");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--check", checks, "all, or comma-separated check names");
    sub->add_option("--mesh-level", mesh_level, "halve the target edge length N times")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (mesh_level >= 0) apply_mesh_level(cfg, mesh_level);
    if (!checks.empty()) {
      cfg.checks.clear();
      std::stringstream ss(checks);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) cfg.checks.push_back(item);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  const RunOutcome out = run_command(command, cfg);
  for (const CheckResult& c : out.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " bound=" << c.bound << '\n';
  if (out.exit_code == kExitOk) {
    std::cout << command << ": ok (" << cfg.output_dir << ")\n";
  } else {
    std::cerr << command << ": " << out.message << '\n';
  }
  return out.exit_code;
}
