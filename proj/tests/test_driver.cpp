#include <doctest.h>

#include <fstream>
#include <sstream>

#include "scenario.hpp"

using namespace qglevy;
using namespace qglevy::driver;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scenarios_dir() {
  // tests run from the build tree; scenarios sit next to the sources
  for (auto base : {std::filesystem::path(QGLEVY_SOURCE_DIR) / "scenarios"}) {
    if (std::filesystem::exists(base)) return base;
  }
  throw std::runtime_error("scenarios directory not found");
}

}  // namespace

TEST_CASE("scenario parsing and schema") {
  json schema = scenario_schema();
  CHECK(schema.contains("properties"));
  Scenario s = load_scenario(scenarios_dir() / "suq3_hunt.json");
  CHECK(s.ctx.N == 3);
  CHECK(s.ctx.variant == Variant::SUq);
  CHECK(*s.ctx.q0 == Rat(1, 2));
  CHECK(s.levels.size() == 2);
  CHECK(s.levels[0].eta_nn.size() == 8);
  CHECK(s.gaussian.has_value());
  CHECK_THROWS_AS(parse_scenario(json{{"variant", "bogus"}, {"N", 2}}), PreconditionError);
  // invalid q range is rejected by the context
  CHECK_THROWS_AS(parse_scenario(json{{"N", 2}, {"q", "3/2"}}), AlgebraError);
}

TEST_CASE("rep construction from specs") {
  Scenario s = load_scenario(scenarios_dir() / "suq3_decompose.json");
  MatRep rep = build_rep(s.rep_spec, s.ctx, s.dim);
  CHECK(rep.dim == 113);
  CHECK_THROWS_AS(build_rep(json{{"type", "nonsense"}}, s.ctx, 8), PreconditionError);
}

TEST_CASE("commands produce reports with stable bytes") {
  auto out1 = std::filesystem::temp_directory_path() / "qglevy_t1";
  auto out2 = std::filesystem::temp_directory_path() / "qglevy_t2";

  SUBCASE("check-relations") {
    Scenario s = load_scenario(scenarios_dir() / "suq2_check_relations.json");
    s.dim = 32;  // keep the unit test quick; acceptance runs M=64
    REQUIRE(run_command("check-relations", s, out1) == kExitOk);
    REQUIRE(run_command("check-relations", s, out2) == kExitOk);
    CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
    json rep = json::parse(slurp(out1 / "report.json"));
    CHECK(rep["max_interior_residual"].get<double>() < 1e-12);
  }
  SUBCASE("gauss") {
    Scenario s = load_scenario(scenarios_dir() / "suq3_hunt.json");
    REQUIRE(run_command("gauss", s, out1) == kExitOk);
    json rep = json::parse(slurp(out1 / "report.json"));
    CHECK(rep["roundtrip_error"].get<double>() < 1e-12);
    CHECK(rep["offdiagonal_vanishing"].get<double>() < 1e-14);
  }
  SUBCASE("decompose") {
    Scenario s = load_scenario(scenarios_dir() / "suq3_decompose.json");
    REQUIRE(run_command("decompose", s, out1) == kExitOk);
    json rep = json::parse(slurp(out1 / "report.json"));
    CHECK(rep["levels"][0]["dim"] == 2);
    CHECK(rep["levels"][1]["dim"] == 11);
    CHECK(rep["levels"][2]["dim"] == 100);
    CHECK(rep["gaussian_matches_level1"] == true);
    CHECK(std::filesystem::exists(out1 / "level3_basis.bin"));
    MatrixXcd basis = read_matrix_bin((out1 / "level3_basis.bin").string());
    CHECK(basis.cols() == 100);
  }
  SUBCASE("hunt with csv sidecar") {
    Scenario s = load_scenario(scenarios_dir() / "suq3_hunt.json");
    REQUIRE(run_command("hunt", s, out1) == kExitOk);
    REQUIRE(run_command("hunt", s, out2) == kExitOk);
    CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
    CHECK(slurp(out1 / "psi_values.csv") == slurp(out2 / "psi_values.csv"));
    json rep = json::parse(slurp(out1 / "report.json"));
    CHECK(rep["route_agreement_max"].get<double>() < 1e-6);
    CHECK(rep["gram_min_eig"].get<double>() > -1e-8);
    CHECK(std::filesystem::exists(out1 / "psi_values.csv"));
  }
  SUBCASE("uq hunt") {
    Scenario s = load_scenario(scenarios_dir() / "uq2_hunt.json");
    REQUIRE(run_command("hunt", s, out1) == kExitOk);
    json rep = json::parse(slurp(out1 / "report.json"));
    CHECK(rep["pushback_defect"].get<double>() < 1e-8);
  }
  SUBCASE("counterexample") {
    Scenario s = load_scenario(scenarios_dir() / "counterexample.json");
    s.dim = 32;
    REQUIRE(run_command("counterexample", s, out1) == kExitOk);
    json rep = json::parse(slurp(out1 / "report.json"));
    CHECK(rep["verdict"] == "divergent");
  }
  SUBCASE("semigroup") {
    Scenario s = load_scenario(scenarios_dir() / "suq2_semigroup.json");
    REQUIRE(run_command("semigroup", s, out1) == kExitOk);
    json rep = json::parse(slurp(out1 / "report.json"));
    for (const auto& row : rep["rows"]) {
      CHECK(row["unit_defect"].get<double>() < 1e-10);
      CHECK(row["semigroup_defect"].get<double>() < 1e-6);
      CHECK(row["gram_min_eig"].get<double>() > -1e-6);
    }
  }
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
}

TEST_CASE("structured errors map to exit codes") {
  auto out = std::filesystem::temp_directory_path() / "qglevy_terr";
  // precondition: non-PSD gaussian
  {
    json j = {{"variant", "suq"},
              {"N", 2},
              {"q", "1/2"},
              {"gaussian", {{"r", {0.0}}, {"R", {{-1.0}}}}}};
    CHECK_THROWS_AS(parse_scenario(j), PreconditionError);
  }
  // precondition at run time: missing rep
  {
    Scenario s = parse_scenario(json{{"variant", "suq"}, {"N", 2}, {"q", "1/2"}});
    CHECK(run_command("decompose", s, out) == kExitPrecondition);
    json rep = json::parse(slurp(out / "report.json"));
    CHECK(rep["error"]["kind"] == "precondition");
  }
  // convergence failure: the divergence witness fed through a p-limit level
  {
    json j = {{"variant", "suq"}, {"N", 3}, {"q", "1/2"}, {"tol", 1e-8},
              {"rep",
               {{"type", "conv"},
                {"left", {{"type", "block"}, {"offset", 0},
                          {"inner", {{"type", "suq2"}, {"dim", 10}}}}},
                {"right", {{"type", "block"}, {"offset", 1},
                           {"inner", {{"type", "suq2"}, {"dim", 10}}}}}}},
              {"p_schedule", {{"m_min", 4}, {"m_max", 12}}}};
    Scenario s = parse_scenario(j);
    LevelSpec bad;
    bad.n = 3;
    bad.eta_nn = VectorXcd::Zero(100);
    bad.eta_nn(0) = 1.0;
    bad.method = Cocycle::Method::PLimit;
    s.levels.push_back(bad);
    CHECK(run_command("hunt", s, out) == kExitConvergence);
    json rep = json::parse(slurp(out / "report.json"));
    CHECK(rep["error"]["kind"] == "convergence");
  }
  std::filesystem::remove_all(out);
}
