// Scenario configs and the batch driver behind the CLI: JSON scenarios in,
// machine-readable reports (JSON + CSV sidecar) out.

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

#include "qglevy/uqn.hpp"

namespace qglevy::driver {

using nlohmann::json;

struct Scenario {
  AlgebraCtx ctx;                 // variant, N, q
  Eigen::Index dim = 16;          // default constructor size
  uint64_t seed = 1;
  double tol = 1e-8;
  PSchedule sched;
  std::optional<GaussParams> gaussian;
  json rep_spec;                  // representation constructor, may be null
  std::vector<LevelSpec> levels;
  BatterySpec battery;
};

Scenario parse_scenario(const json& j);
Scenario load_scenario(const std::filesystem::path& file);

// {type: suq2|torus|trivial|block|conv|sum, ...}
MatRep build_rep(const json& spec, const AlgebraCtx& ctx, Eigen::Index default_dim);

// Exit codes: 0 ok, 2 precondition, 3 convergence failure, 4 internal.
constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitInternal = 4;

// Commands: check-relations, gauss, decompose, hunt, counterexample,
// semigroup. Writes <out>/report.json (+ psi_values.csv for hunt and
// semigroup) and returns an exit code; error reports carry a structured
// "error" object.
int run_command(const std::string& command, const Scenario& s,
                const std::filesystem::path& out_dir);

json scenario_schema();  // the published config schema

}  // namespace qglevy::driver
