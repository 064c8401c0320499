// qglevy: batch driver for the SU_q(N)/U_q(N) generating-functional
// toolkit. Scenario configs in, machine-readable reports out.

#include <CLI11.hpp>

#include <iostream>

#include "scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quantum-group Levy toolkit batch driver"};
  app.require_subcommand(0, 1);

  std::string scenario_path;
  std::string out_dir = "out";
  uint64_t seed = 0;
  double tol = 0;
  long dim = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "scenario config file (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the scenario seed");
    cmd->add_option("--tol", tol, "override the scenario tolerance");
    cmd->add_option("--dim", dim, "override the scenario dimension");
  };

  std::vector<std::string> commands = {"check-relations", "gauss", "decompose",
                                       "hunt",            "counterexample", "semigroup"};
  for (const auto& c : commands) add_common(app.add_subcommand(c));
  auto* schema_cmd = app.add_subcommand("schema", "print the scenario JSON schema");

  CLI11_PARSE(app, argc, argv);

  if (schema_cmd->parsed()) {
    std::cout << qglevy::driver::scenario_schema().dump(2) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    qglevy::driver::Scenario s = qglevy::driver::load_scenario(scenario_path);
    if (seed) s.seed = seed;
    if (tol > 0) s.tol = tol;
    if (dim > 0) s.dim = dim;
    int code = qglevy::driver::run_command(command, s, out_dir);
    if (code == 0)
      std::cout << "ok: " << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
    else
      std::cerr << "failed (exit " << code << "); see "
                << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
    return code;
  } catch (const qglevy::PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return qglevy::driver::kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qglevy::driver::kExitInternal;
  }
}
