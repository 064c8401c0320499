#include "scenario.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace qglevy::driver {

namespace {

VectorXcd parse_cvector(const json& j) {
  VectorXcd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_array())
      v[i] = Cplx(j[i][0].get<double>(), j[i].size() > 1 ? j[i][1].get<double>() : 0.0);
    else
      v[i] = Cplx(j[i].get<double>(), 0.0);
  }
  return v;
}

GaussParams parse_gauss(const json& j, const AlgebraCtx& ctx) {
  GaussParams p = GaussParams::zero(ctx);
  const auto& r = j.at("r");
  if (static_cast<Eigen::Index>(r.size()) != p.drift.size())
    throw PreconditionError("scenario: gaussian r has the wrong length");
  for (size_t i = 0; i < r.size(); ++i) p.drift[static_cast<Eigen::Index>(i)] = r[i].get<double>();
  const auto& R = j.at("R");
  for (size_t i = 0; i < R.size(); ++i)
    for (size_t k = 0; k < R[i].size(); ++k)
      p.diffusion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          R[i][k].get<double>();
  p.validate();
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::string format_cplx_csv(const Cplx& v) {
  std::ostringstream os;
  os << std::setprecision(17) << v.real() << "," << v.imag();
  return os.str();
}

}  // namespace

Scenario parse_scenario(const json& j) {
  Scenario s;
  std::string variant = j.value("variant", "suq");
  int N = j.at("N").get<int>();
  Rat q = parse_rat(j.value("q", "1/2"));
  if (variant == "suq")
    s.ctx = suq_ctx(N, q);
  else if (variant == "uq")
    s.ctx = uq_ctx(N, q);
  else
    throw PreconditionError("scenario: variant must be suq or uq");
  s.dim = j.value("dim", 16);
  s.seed = j.value("seed", static_cast<uint64_t>(1));
  s.tol = j.value("tol", 1e-8);
  if (j.contains("p_schedule")) {
    s.sched.m_min = j["p_schedule"].value("m_min", 4);
    s.sched.m_max = j["p_schedule"].value("m_max", 20);
  }
  if (j.contains("gaussian")) s.gaussian = parse_gauss(j["gaussian"], s.ctx);
  if (j.contains("rep")) s.rep_spec = j["rep"];
  if (j.contains("levels")) {
    for (const auto& jl : j["levels"]) {
      LevelSpec ls;
      ls.n = jl.at("n").get<int>();
      ls.eta_nn = parse_cvector(jl.at("eta_nn"));
      std::string method = jl.value("method", "closed_form");
      if (method == "closed_form")
        ls.method = Cocycle::Method::ClosedForm;
      else if (method == "p_limit")
        ls.method = Cocycle::Method::PLimit;
      else
        throw PreconditionError("scenario: level method must be closed_form or p_limit");
      s.levels.push_back(std::move(ls));
    }
  }
  if (j.contains("battery")) {
    const auto& jb = j["battery"];
    s.battery.max_degree = jb.value("max_degree", 2);
    s.battery.count = jb.value("count", 0);
    s.battery.seed = jb.value("seed", s.seed);
    if (jb.contains("generators"))
      for (const auto& g : jb["generators"])
        s.battery.generators.push_back(
            GenSym::u(g[0].get<int>(), g[1].get<int>()));
  }
  s.battery.seed = s.battery.seed ? s.battery.seed : s.seed;
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw PreconditionError("scenario file not found: " + file.string());
  json j;
  is >> j;
  return parse_scenario(j);
}

MatRep build_rep(const json& spec, const AlgebraCtx& ctx, Eigen::Index default_dim) {
  std::string type = spec.at("type").get<std::string>();
  const Rat q = ctx.q0 ? *ctx.q0 : Rat(1, 2);
  if (type == "suq2") {
    Eigen::Index m = spec.value("dim", default_dim);
    MatRep rep = suq2_irrep(m, q);
    if (ctx.variant == Variant::SUq && ctx.N == 2) return rep;
    if (ctx.variant == Variant::Uq && ctx.N == 2) return uq_rep_from_suq(rep);
    throw PreconditionError("rep spec: suq2 needs an (S)Uq(2) context; wrap it in a block");
  }
  if (type == "torus") {
    std::vector<double> theta;
    for (const auto& t : spec.at("theta")) theta.push_back(t.get<double>());
    return torus_char_rep(ctx, theta);
  }
  if (type == "trivial") return trivial_rep(ctx, spec.value("dim", Eigen::Index{1}));
  if (type == "block") {
    const auto& ji = spec.at("inner");
    Eigen::Index m = ji.value("dim", default_dim);
    if (ji.at("type").get<std::string>() != "suq2")
      throw PreconditionError("rep spec: block inner must be suq2");
    return block_embed(suq2_irrep(m, q), ctx.N, spec.value("offset", 0));
  }
  if (type == "conv")
    return conv_product(build_rep(spec.at("left"), ctx, default_dim),
                        build_rep(spec.at("right"), ctx, default_dim));
  if (type == "sum") {
    std::vector<MatRep> parts;
    for (const auto& jp : spec.at("parts")) parts.push_back(build_rep(jp, ctx, default_dim));
    return direct_sum(parts);
  }
  throw PreconditionError("rep spec: unknown type " + type);
}

json scenario_schema() {
  return json::parse(R"({
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "qglevy scenario",
    "type": "object",
    "required": ["N"],
    "properties": {
      "variant": {"enum": ["suq", "uq"], "default": "suq"},
      "N": {"type": "integer", "minimum": 1},
      "q": {"type": "string", "description": "rational in (0,1), e.g. 1/2"},
      "dim": {"type": "integer", "minimum": 1},
      "seed": {"type": "integer"},
      "tol": {"type": "number"},
      "p_schedule": {"type": "object", "properties": {
        "m_min": {"type": "integer"}, "m_max": {"type": "integer"}}},
      "gaussian": {"type": "object", "required": ["r", "R"], "properties": {
        "r": {"type": "array", "items": {"type": "number"}},
        "R": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}}},
      "rep": {"$ref": "#/definitions/rep"},
      "levels": {"type": "array", "items": {"type": "object",
        "required": ["n", "eta_nn"],
        "properties": {
          "n": {"type": "integer", "minimum": 2},
          "eta_nn": {"type": "array", "items": {"type": "array",
            "items": {"type": "number"}, "minItems": 1, "maxItems": 2}},
          "method": {"enum": ["closed_form", "p_limit"]}}}},
      "battery": {"type": "object", "properties": {
        "max_degree": {"type": "integer"},
        "count": {"type": "integer"},
        "seed": {"type": "integer"},
        "generators": {"type": "array", "items": {"type": "array",
          "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}}}}
    },
    "definitions": {
      "rep": {"type": "object", "required": ["type"], "properties": {
        "type": {"enum": ["suq2", "torus", "trivial", "block", "conv", "sum"]},
        "dim": {"type": "integer"},
        "theta": {"type": "array", "items": {"type": "number"}},
        "offset": {"type": "integer"},
        "inner": {"$ref": "#/definitions/rep"},
        "left": {"$ref": "#/definitions/rep"},
        "right": {"$ref": "#/definitions/rep"},
        "parts": {"type": "array", "items": {"$ref": "#/definitions/rep"}}}}
    }
  })");
}

// ---------------------------------------------------------------------------
// Commands

namespace {

json run_check_relations(const Scenario& s) {
  if (s.rep_spec.is_null()) throw PreconditionError("check-relations: scenario needs a rep");
  MatRep rep = build_rep(s.rep_spec, s.ctx, s.dim);
  ResidualReport rr = relation_residuals(rep, true);
  json rows = json::array();
  for (const auto& row : rr.rows)
    rows.push_back({{"relation", row.label},
                    {"degree", row.degree},
                    {"interior", row.interior},
                    {"full", row.full}});
  return {{"command", "check-relations"},
          {"rep", s.rep_spec},
          {"dim", rep.dim},
          {"interior_dim", rep.interior_dim()},
          {"max_interior_residual", rr.max_interior},
          {"max_contraction_excess", rr.max_contraction_excess},
          {"unit_defect", rr.unit_defect},
          {"rows", rows}};
}

json run_gauss(const Scenario& s) {
  if (!s.gaussian) throw PreconditionError("gauss: scenario needs gaussian parameters");
  Functional psi = gaussian_functional(s.ctx, *s.gaussian);
  GaussParams rec = recover_params(s.ctx, psi, s.tol);
  double err = (rec.drift - s.gaussian->drift).norm() +
               (rec.diffusion - s.gaussian->diffusion).norm();
  // vanishing on off-diagonal words
  double offdiag = 0;
  auto battery = k1_battery(s.ctx, s.battery);
  for (const auto& a : battery) {
    bool has_offdiag = false;
    for (const auto& [w, c] : a.terms())
      for (const GenSym& g : w)
        if ((g.kind == GenSym::Kind::U || g.kind == GenSym::Kind::Ustar) && g.row != g.col)
          has_offdiag = true;
    if (has_offdiag) offdiag = std::max(offdiag, std::abs(psi(a)));
  }
  auto genrep = is_generating(psi, battery);
  return {{"command", "gauss"},
          {"roundtrip_error", err},
          {"offdiagonal_vanishing", offdiag},
          {"psi_one", std::abs(genrep.psi_one)},
          {"hermitian_defect", genrep.hermitian_defect},
          {"gram_min_eig", genrep.gram_min_eig}};
}

json run_decompose(const Scenario& s, const std::filesystem::path& out_dir) {
  if (s.rep_spec.is_null()) throw PreconditionError("decompose: scenario needs a rep");
  MatRep rep = build_rep(s.rep_spec, s.ctx, s.dim);
  if (rep.ctx.variant == Variant::Uq)
    throw PreconditionError("decompose: use variant suq (lift Uq scenarios through hunt)");
  DecompositionResult dec = decompose(rep, s.tol);
  json levels = json::array();
  for (const auto& l : dec.levels) {
    if (l.basis.cols() > 0) {
      std::string stem = "level" + std::to_string(l.n) + "_basis";
      write_matrix_bin((out_dir / (stem + ".bin")).string(), l.basis);
      write_matrix_csv((out_dir / (stem + ".csv")).string(), l.basis);
    }
    levels.push_back({{"n", l.n},
                      {"dim", l.basis.cols()},
                      {"inj_sigma_min", l.inj_sigma_min}});
  }
  MatrixXcd mg = maximal_gaussian_subspace(rep, s.tol);
  return {{"command", "decompose"},
          {"dim", rep.dim},
          {"levels", levels},
          {"max_invariance_residual", dec.max_invariance_residual},
          {"max_livingon_residual", dec.max_livingon_residual},
          {"maximal_gaussian_dim", mg.cols()},
          {"gaussian_matches_level1",
           mg.cols() == dec.level_dim(1)}};
}

json run_hunt(const Scenario& s, std::string& csv) {
  if (s.rep_spec.is_null()) throw PreconditionError("hunt: scenario needs a rep");
  GaussParams gp = s.gaussian ? *s.gaussian : GaussParams::zero(s.ctx);

  json out;
  std::vector<AlgElt> battery;
  std::function<Cplx(const AlgElt&)> total;
  double route_worst = 0;

  if (s.ctx.variant == Variant::SUq) {
    MatRep rep = build_rep(s.rep_spec, s.ctx, s.dim);
    HuntDecomposition hunt = hunt_decompose(rep, s.levels, gp, s.tol, s.sched);
    battery = k1_battery(s.ctx, s.battery);
    total = [hunt](const AlgElt& a) { return hunt.psi_total(a); };
    json levels = json::array();
    for (const auto& l : hunt.levels) {
      // route agreement per level on the battery through the chain
      double worst = 0;
      VectorXcd corner = l.eta_n.gen_value(GenSym::u(l.n, l.n));
      for (const auto& a : battery) {
        AlgElt down = l.chain ? l.chain->apply(a) : a;
        Cplx v1 = psi_exact(l.eta_n, down);
        PLimitValue v2 = psi_plimit(*l.rep_n, corner, down, s.sched, s.tol);
        worst = std::max(worst, std::abs(v1 - v2.value));
      }
      route_worst = std::max(route_worst, worst);
      levels.push_back({{"n", l.n},
                        {"dim", l.basis.cols()},
                        {"inj_sigma_min", l.inj_sigma_min},
                        {"living_residual", l.living_residual},
                        {"route_agreement", worst}});
    }
    out["levels"] = levels;
    out["max_invariance_residual"] = hunt.max_invariance_residual;
    out["max_livingon_residual"] = hunt.max_livingon_residual;
  } else {
    MatRep rep = build_rep(
        s.rep_spec, uq_ctx(s.ctx.N, s.ctx.q0), s.dim);
    UqHunt uh = uq_hunt(rep, s.levels, gp, s.tol, s.sched);
    battery = k1_battery(s.ctx, s.battery);
    total = [uh](const AlgElt& a) { return uh.psi_total(a); };
    json levels = json::array();
    for (const auto& l : uh.inner.levels)
      levels.push_back({{"n", l.n},
                        {"dim", l.basis.cols()},
                        {"inj_sigma_min", l.inj_sigma_min},
                        {"living_residual", l.living_residual}});
    out["levels"] = levels;
    out["pushback_defect"] = uh.pushback_defect;
  }

  // psi table + positivity
  json table = json::array();
  std::ostringstream csv_os;
  csv_os << "element,psi_re,psi_im\n";
  Functional tot;
  tot.eval = total;
  tot.hermitian = true;
  for (const auto& a : battery) {
    Cplx v = total(a);
    table.push_back({{"element", print_elt(a)}, {"re", v.real()}, {"im", v.imag()}});
    csv_os << '"' << print_elt(a) << "\"," << format_cplx_csv(v) << "\n";
  }
  auto genrep = is_generating(tot, battery);
  out["command"] = "hunt";
  out["battery_size"] = battery.size();
  out["psi_values"] = table;
  out["route_agreement_max"] = route_worst;
  out["gram_min_eig"] = genrep.gram_min_eig;
  out["hermitian_defect"] = genrep.hermitian_defect;
  csv = csv_os.str();
  return out;
}

json run_counterexample(const Scenario& s) {
  Eigen::Index M = std::max<Eigen::Index>(s.dim, 16);
  PSchedule sched = s.sched;
  if (sched.m_max > 14) sched.m_max = 14;
  CounterexampleReport rep = counterexample_n3(M, s.ctx.q0 ? *s.ctx.q0 : Rat(1, 2), sched);
  json trace = json::array();
  for (size_t i = 0; i < rep.p_values.size(); ++i)
    trace.push_back({{"p", rep.p_values[i]},
                     {"eta_u11_norm", rep.eta_u11_norms[i]},
                     {"oracle_norm", rep.oracle_norms[i]},
                     {"control_norm", rep.control_norms[i]}});
  return {{"command", "counterexample"},
          {"M", M},
          {"trace", trace},
          {"growth_ratio", rep.growth_ratio},
          {"oracle_ratio", rep.oracle_ratio},
          {"untruncated_oracle_ratio", rep.untruncated_oracle_ratio},
          {"monotone", rep.monotone},
          {"verdict", rep.divergent ? "divergent" : "convergent"},
          {"control_cauchy_defect", rep.control_cauchy_defect}};
}

json run_semigroup(const Scenario& s, std::string& csv) {
  if (s.rep_spec.is_null() || s.ctx.variant != Variant::SUq)
    throw PreconditionError("semigroup: scenario needs an suq rep");
  MatRep rep = build_rep(s.rep_spec, s.ctx, s.dim);
  GaussParams gp = s.gaussian ? *s.gaussian : GaussParams::zero(s.ctx);
  HuntDecomposition hunt = hunt_decompose(rep, s.levels, gp, s.tol, s.sched);
  Functional psi = hunt.total_functional();
  auto battery = k1_battery(s.ctx, s.battery);

  json out;
  out["command"] = "semigroup";
  json rows = json::array();
  std::ostringstream csv_os;
  csv_os << "t,element,phi_re,phi_im\n";
  for (double t : {0.05, 0.1}) {
    double unit_defect = std::abs(conv_exp(psi, t, AlgElt::unit(s.ctx)) - Cplx(1, 0));
    // semigroup law at (t/2, t/2)
    Functional phi_half;
    double th = t / 2;
    phi_half.eval = [psi, th](const AlgElt& a) { return conv_exp(psi, th, a); };
    Functional conv2 = convolve(phi_half, phi_half);
    double semigroup_defect = 0;
    std::vector<Cplx> values;
    for (const auto& a : battery) {
      Cplx direct = conv_exp(psi, t, a);
      semigroup_defect = std::max(semigroup_defect, std::abs(conv2(a) - direct));
      values.push_back(direct);
      csv_os << t << ",\"" << print_elt(a) << "\"," << format_cplx_csv(direct) << "\n";
    }
    Functional phi_t;
    phi_t.eval = [psi, t](const AlgElt& a) { return conv_exp(psi, t, a); };
    phi_t.hermitian = true;
    auto genrep = is_generating(phi_t, battery);
    rows.push_back({{"t", t},
                    {"unit_defect", unit_defect},
                    {"semigroup_defect", semigroup_defect},
                    {"gram_min_eig", genrep.gram_min_eig}});
  }
  out["rows"] = rows;
  csv = csv_os.str();
  return out;
}

}  // namespace

int run_command(const std::string& command, const Scenario& s,
                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  json report;
  std::string csv;
  int code = kExitOk;
  try {
    if (command == "check-relations")
      report = run_check_relations(s);
    else if (command == "gauss")
      report = run_gauss(s);
    else if (command == "decompose")
      report = run_decompose(s, out_dir);
    else if (command == "hunt")
      report = run_hunt(s, csv);
    else if (command == "counterexample")
      report = run_counterexample(s);
    else if (command == "semigroup")
      report = run_semigroup(s, csv);
    else
      throw PreconditionError("unknown command: " + command);
  } catch (const PreconditionError& e) {
    report = {{"error", {{"kind", "precondition"}, {"message", e.what()}}}};
    code = kExitPrecondition;
  } catch (const ConvergenceError& e) {
    report = {{"error", {{"kind", "convergence"}, {"message", e.what()}}}};
    code = kExitConvergence;
  } catch (const std::exception& e) {
    report = {{"error", {{"kind", "internal"}, {"message", e.what()}}}};
    code = kExitInternal;
  }
  write_file(out_dir / "report.json", report.dump(2) + "\n");
  if (!csv.empty()) write_file(out_dir / "psi_values.csv", csv);
  return code;
}

}  // namespace qglevy::driver
