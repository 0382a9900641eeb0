// Command-line front door: JSON experiment configs in, run directories with
// CSV/JSON artifacts out. Exit codes: 0 ok, 2 config error, 3 expression
// parse error, 4 solver non-convergence (artifacts are still written).

#include <CLI11.hpp>
#include <algorithm>
#include <clocale>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "varhunt/bifurcation.hpp"
#include "varhunt/fixedpoint.hpp"
#include "varhunt/hypotheses.hpp"
#include "varhunt/minhunt.hpp"
#include "varhunt/varprinciple.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace varhunt;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverFlagged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec vec_from_json(const json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

// ---------------------------------------------------------------- config ---

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw ConfigError(path + "." + it.key() + ": unknown key");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
  return j.at(key);
}

double need_num(const json& j, const std::string& path, const char* key) {
  const json& v = need(j, path, key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected number");
  return v.get<double>();
}

double opt_num(const json& j, const char* key, double def) {
  return j.contains(key) ? j.at(key).get<double>() : def;
}

int opt_int(const json& j, const char* key, int def) {
  return j.contains(key) ? j.at(key).get<int>() : def;
}

std::string opt_str(const json& j, const char* key, const std::string& def) {
  return j.contains(key) ? j.at(key).get<std::string>() : def;
}

Expr parse_expr(const json& j, const std::string& path, const char* key) {
  const json& v = need(j, path, key);
  if (!v.is_string()) throw ConfigError(path + "." + key + ": expected string");
  return Expr::parse(v.get<std::string>());  // ParseError escapes as exit 3
}

// ------------------------------------------------------------- problems ---

struct BuiltPair {
  EnergyPair pair;
  std::shared_ptr<const EnergyModel> model;  // null for toy pairs
  FeSpacePtr space;
};

BuiltPair build_problem(const json& p, const std::string& path) {
  if (p.contains("phi") || p.contains("psi")) {
    reject_unknown(p, path, {"phi", "psi", "box_scale"});
    BuiltPair out;
    out.pair = make_toy_pair(parse_expr(p, path, "phi"), parse_expr(p, path, "psi"),
                             opt_num(p, "box_scale", 0.0));
    return out;
  }
  reject_unknown(p, path,
                 {"p", "bc", "N", "f", "g", "alpha", "beta", "lambda_coef", "eta"});
  double pexp = need_num(p, path, "p");
  std::string bc = need(p, path, "bc").get<std::string>();
  int N = opt_int(p, "N", 64);
  Expr f = parse_expr(p, path, "f");

  std::shared_ptr<const EnergyModel> model;
  auto space = std::make_shared<const FeSpace>(FeSpace{
      Mesh1D::uniform(N), bc == "dirichlet" ? Bc::Dirichlet : Bc::Neumann, 4});
  if (bc == "dirichlet") {
    model = std::make_shared<const EnergyModel>(pexp, DirichletProblem{f});
  } else if (bc == "neumann") {
    Expr g = p.contains("g") ? parse_expr(p, path, "g") : Expr::parse("0");
    Expr alpha = Expr::parse("1"), beta = Expr::parse("0"),
         lam = Expr::parse("1");
    if (p.contains("eta")) {
      // shorthand: weight and zero-order coefficient share one profile
      Expr eta = parse_expr(p, path, "eta");
      alpha = eta;
      lam = eta;
    }
    if (p.contains("alpha")) alpha = parse_expr(p, path, "alpha");
    if (p.contains("beta")) beta = parse_expr(p, path, "beta");
    if (p.contains("lambda_coef")) lam = parse_expr(p, path, "lambda_coef");
    model = std::make_shared<const EnergyModel>(
        pexp, NeumannProblem{f, g, alpha, beta, lam});
  } else {
    throw ConfigError(path + ".bc: expected \"dirichlet\" or \"neumann\"");
  }
  model->validate(*space);
  BuiltPair out;
  out.model = model;
  out.space = space;
  out.pair = make_fem_pair(model, space);
  return out;
}

std::vector<double> build_rho_grid(const json& cfg, const std::string& path) {
  if (cfg.contains("rho_values")) {
    std::vector<double> out = cfg.at("rho_values").get<std::vector<double>>();
    if (out.empty()) throw ConfigError(path + ".rho_values: empty grid");
    return out;
  }
  const json& g = need(cfg, path, "rho_grid");
  reject_unknown(g, path + ".rho_grid", {"lo", "hi", "count"});
  GridSpec spec{need_num(g, path + ".rho_grid", "lo"),
                need_num(g, path + ".rho_grid", "hi"),
                static_cast<int>(need_num(g, path + ".rho_grid", "count"))};
  if (spec.count < 1) throw ConfigError(path + ".rho_grid.count: empty grid");
  return geometric_grid(spec);
}

// ------------------------------------------------------------- run dirs ---

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct Run {
  fs::path dir;
  std::vector<std::string> files;
  json report;
  bool flagged = false;  // some solver did not converge -> exit 4

  void write(const std::string& name, const std::string& content) {
    std::ofstream os(dir / name, std::ios::binary);
    os << content;
    files.push_back(name);
  }
  void finish() {
    report["version"] = kVersion;
    write("report.json", report.dump(2) + "\n");
    std::sort(files.begin(), files.end());
    std::string manifest;
    for (const auto& f : files) manifest += f + "\n";
    manifest += "MANIFEST\n";
    std::ofstream os(dir / "MANIFEST", std::ios::binary);
    os << manifest;
  }
};

Run open_run(const std::string& out_dir, const std::string& command,
             const json& cfg, std::uint64_t seed) {
  std::uint64_t h = fnv1a(command + "\n" + cfg.dump() + "\n" + std::to_string(seed));
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  Run run;
  run.dir = fs::path(out_dir) / hex;
  fs::create_directories(run.dir);
  run.write("config.json", cfg.dump(2) + "\n");
  run.report["command"] = command;
  run.report["seed"] = seed;
  run.report["certificates"] = json::array();
  return run;
}

// ----------------------------------------------------------- phi curves ---

json quotient_certificate(const PhiCurvePoint& pt) {
  return {{"kind", "quotient"},
          {"rho", pt.rho},
          {"phi_hat", pt.phi_hat},
          {"m_hat", pt.m_hat},
          {"x", vec_to_json(pt.certificate_x)},
          {"infx", vec_to_json(pt.certificate_infx)}};
}

std::string phi_curve_csv(const EnergyPair& pair,
                          const std::vector<PhiCurvePoint>& pts) {
  std::string csv = "rho,phi_hat,m_hat,psi_at_cert,phi_value_at_cert,restarts,flag\n";
  for (const auto& pt : pts) {
    csv += fmt(pt.rho) + "," + fmt(pt.phi_hat) + "," + fmt(pt.m_hat) + "," +
           fmt(pair.psi(pt.certificate_x)) + "," +
           fmt(pair.phi(pt.certificate_x)) + "," + std::to_string(pt.restarts) +
           "," + (pt.converged ? "" : "maxiter") + "\n";
  }
  return csv;
}

int cmd_phi_curve(const json& cfg, const std::string& out_dir, std::uint64_t seed) {
  reject_unknown(cfg, "config",
                 {"problem", "rho_grid", "rho_values", "window", "budget", "seed"});
  BuiltPair built = build_problem(need(cfg, "config", "problem"), "config.problem");
  std::vector<double> rhos = build_rho_grid(cfg, "config");
  int budget = opt_int(cfg, "budget", 8);
  int window = opt_int(cfg, "window", 3);

  Run run = open_run(out_dir, "phi-curve", cfg, seed);
  std::vector<PhiCurvePoint> pts;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    PhiCurvePoint pt = phi_of_rho(built.pair, rhos[i],
                                  budget, splitmix64(seed + i));
    if (!pt.converged) run.flagged = true;
    run.report["certificates"].push_back(quotient_certificate(pt));
    pts.push_back(std::move(pt));
  }
  run.write("phi_curve.csv", phi_curve_csv(built.pair, pts));

  std::vector<double> vals;
  for (const auto& pt : pts) vals.push_back(pt.phi_hat);
  auto window_min = [&](std::size_t lo, std::size_t hi) {
    double m = vals[lo];
    for (std::size_t i = lo; i < hi; ++i) m = std::min(m, vals[i]);
    return m;
  };
  std::size_t w = std::min<std::size_t>(window, vals.size());
  json thresholds = {
      {"gamma_hat", window_min(vals.size() - w, vals.size())},
      {"delta_hat", window_min(0, w)},
      {"lambda_star_hat", *std::min_element(vals.begin(), vals.end())},
      {"grid", rhos},
      {"window", window}};
  run.write("thresholds.json", thresholds.dump(2) + "\n");
  run.report["thresholds"] = thresholds;
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return run.flagged ? 4 : 0;
}

// ---------------------------------------------------------------- hunts ---

int level_index(const std::vector<double>& levels, double rho) {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] == rho) return static_cast<int>(i);
  return -1;
}

std::string hunt_csv(const HuntReport& rep) {
  std::string csv =
      "level_index,rho,psi,phi,energy,grad_norm,residual,accepted,reject_reason\n";
  for (const auto& m : rep.accepted) {
    csv += std::to_string(level_index(rep.levels, m.generating_rho)) + "," +
           fmt(m.generating_rho) + "," + fmt(m.psi) + "," + fmt(m.phi) + "," +
           fmt(m.energy) + "," + fmt(m.grad_sup) + "," + fmt(m.residual) +
           ",1,\n";
  }
  for (const auto& r : rep.rejected) {
    csv += std::to_string(r.level) + "," + fmt(r.rho) + "," + fmt(r.psi) +
           ",nan,nan," + fmt(r.grad_sup) + ",nan,0," + r.reason + "\n";
  }
  return csv;
}

void emit_hunt_artifacts(Run& run, const BuiltPair& built, const HuntReport& rep,
                         double mu) {
  run.write("hunt.csv", hunt_csv(rep));
  for (std::size_t k = 0; k < rep.accepted.size(); ++k) {
    const LocalMin& m = rep.accepted[k];
    json cert = {{"kind", "local_min"},
                 {"mu", mu},
                 {"rho", m.generating_rho},
                 {"energy", m.energy},
                 {"grad_sup", m.grad_sup},
                 {"residual", m.residual}};
    if (built.model) {
      std::string name = "u_" + std::to_string(k) + ".csv";
      run.write(name, discrete_fn_to_csv(DiscreteFn(built.space, m.x)));
      cert["file"] = name;
    } else {
      cert["x"] = vec_to_json(m.x);
    }
    run.report["certificates"].push_back(cert);
  }
  run.report["accepted"] = rep.accepted.size();
  run.report["stagnated"] = rep.stagnated;
}

HuntReport run_hunt_from_config(const json& cfg, const BuiltPair& built,
                                std::uint64_t seed, double* mu_out) {
  double mu = opt_num(cfg, "mu", 1.0);
  *mu_out = mu;
  std::string direction = opt_str(cfg, "direction", "increasing");
  const json& lad = need(cfg, "config", "ladder");
  reject_unknown(lad, "config.ladder", {"rho0", "factor", "levels"});
  LadderSpec ladder{need_num(lad, "config.ladder", "rho0"),
                    opt_num(lad, "factor", 4.0), opt_int(lad, "levels", 8)};
  HuntOptions opts;
  opts.budget = opt_int(cfg, "budget", 10);
  opts.stagnation_levels = opt_int(cfg, "stagnation", 3);
  if (built.model) opts.tol.grad_tol = 1e-6;
  if (direction == "increasing")
    return hunt_increasing(built.pair, mu, ladder, seed, opts);
  if (direction == "decreasing")
    return hunt_decreasing(built.pair, mu, ladder, seed, opts);
  throw ConfigError("config.direction: expected increasing or decreasing");
}

int cmd_hunt(const json& cfg, const std::string& out_dir, std::uint64_t seed) {
  reject_unknown(cfg, "config",
                 {"problem", "mu", "direction", "ladder", "budget", "stagnation",
                  "seed"});
  BuiltPair built = build_problem(need(cfg, "config", "problem"), "config.problem");
  Run run = open_run(out_dir, "hunt", cfg, seed);
  double mu = 1.0;
  HuntReport rep = run_hunt_from_config(cfg, built, seed, &mu);
  emit_hunt_artifacts(run, built, rep, mu);
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return 0;
}

// ------------------------------------------------------------ bifurcate ---

BranchModel build_branch_model(const json& m, const std::string& path) {
  reject_unknown(m, path, {"f", "g", "alpha", "beta", "s", "q", "N"});
  BranchModel out;
  out.s = need_num(m, path, "s");
  out.q = need_num(m, path, "q");
  out.alpha = opt_num(m, "alpha", 1.0);
  out.beta = opt_num(m, "beta", 1.0);
  out.elements = opt_int(m, "N", 64);
  out.f = m.contains("f") ? parse_expr(m, path, "f")
                          : Expr::parse("xi^" + fmt(out.s));
  out.g = m.contains("g") ? parse_expr(m, path, "g")
                          : Expr::parse("xi^" + fmt(out.q));
  out.validate();
  return out;
}

int cmd_bifurcate(const json& cfg, const std::string& out_dir, std::uint64_t seed) {
  reject_unknown(cfg, "config", {"model", "lambda_grid", "lambda_values", "seed"});
  BranchModel model = build_branch_model(need(cfg, "config", "model"), "config.model");
  std::vector<double> grid;
  if (cfg.contains("lambda_values")) {
    grid = cfg.at("lambda_values").get<std::vector<double>>();
  } else {
    const json& g = need(cfg, "config", "lambda_grid");
    reject_unknown(g, "config.lambda_grid", {"hi", "lo", "points"});
    grid = geometric_lambda_grid(need_num(g, "config.lambda_grid", "hi"),
                                 need_num(g, "config.lambda_grid", "lo"),
                                 opt_int(g, "points", 12));
  }

  Run run = open_run(out_dir, "bifurcate", cfg, seed);
  Branch br = continue_branch(model, grid);
  std::string csv = "lambda,c1proxy,ratio,energy,residual,min_value,iters,flag\n";
  for (std::size_t k = 0; k < br.points.size(); ++k) {
    const BranchPoint& pt = br.points[k];
    std::string flag =
        pt.converged_to_zero ? "zero" : (pt.newton_ok ? "" : "newton");
    if (!pt.newton_ok) run.flagged = true;
    csv += fmt(pt.lambda) + "," + fmt(pt.c1proxy) + "," + fmt(pt.ratio) + "," +
           fmt(pt.energy) + "," + fmt(pt.residual) + "," + fmt(pt.min_value) +
           "," + std::to_string(pt.iters) + "," + flag + "\n";
    if (!pt.converged_to_zero) {
      std::string name = "branch_u_" + std::to_string(k) + ".csv";
      run.write(name, discrete_fn_to_csv(pt.u));
      run.report["certificates"].push_back({{"kind", "branch_point"},
                                            {"lambda", pt.lambda},
                                            {"file", name},
                                            {"energy", pt.energy},
                                            {"ratio", pt.ratio},
                                            {"residual", pt.residual},
                                            {"min_value", pt.min_value}});
    }
  }
  run.write("branch.csv", csv);

  BifurcationEvidence ev = bifurcation_evidence(br);
  json tail = json::array();
  for (auto& [lam, c1] : ev.tail) tail.push_back({lam, c1});
  run.report["verdicts"] = {
      {"energy_negative", br.energy_negative},
      {"energy_decreasing", br.energy_decreasing},
      {"ratio_bounded", br.ratio_bounded},
      {"norms_to_zero", br.norms_to_zero},
      {"branch_lost", br.branch_lost},
      {"lambda_star_lower", br.lambda_star_lower},
      {"bifurcation_evidence",
       ev.answer == BifurcationEvidence::Answer::Yes
           ? "yes"
           : (ev.answer == BifurcationEvidence::Answer::No ? "no"
                                                           : "inconclusive")},
      {"evidence_tail", tail}};
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return run.flagged ? 4 : 0;
}

// ----------------------------------------------------------- fixed point ---

PotentialSpec build_potential(const json& p, const std::string& path) {
  reject_unknown(p, path, {"P", "dim", "radial"});
  int dim = opt_int(p, "dim", 1);
  std::string P = need(p, path, "P").get<std::string>();
  if (P == "plateau") return make_radial_potential(dim, PlateauProfile{});
  Expr e = Expr::parse(P);
  if (p.contains("radial") && p.at("radial").get<bool>()) {
    return PotentialSpec::from_potential(
        dim, [e](const Vec& x) { return e.eval(0.0, x.norm()); });
  }
  if (dim != 1)
    throw ConfigError(path + ": non-radial potentials are one-dimensional");
  return PotentialSpec::from_potential(
      1, [e](const Vec& x) { return e.eval(0.0, x[0]); });
}

int cmd_fixed_point(const json& cfg, const std::string& out_dir,
                    std::uint64_t seed) {
  reject_unknown(cfg, "config",
                 {"potential", "rho", "budget", "radii", "r_grid", "samples",
                  "seed"});
  PotentialSpec spec = build_potential(need(cfg, "config", "potential"),
                                       "config.potential");
  Run run = open_run(out_dir, "fixed-point", cfg, seed);
  int rc = 0;

  if (cfg.contains("radii") || cfg.contains("r_grid")) {
    std::vector<double> radii;
    if (cfg.contains("radii")) {
      radii = cfg.at("radii").get<std::vector<double>>();
    } else {
      const json& g = cfg.at("r_grid");
      reject_unknown(g, "config.r_grid", {"lo", "hi", "count"});
      radii = geometric_grid(GridSpec{need_num(g, "config.r_grid", "lo"),
                                      need_num(g, "config.r_grid", "hi"),
                                      opt_int(g, "count", 16)});
    }
    ScanReport scan = thm5_scan(spec, radii, opt_int(cfg, "samples", 8), seed);
    std::string csv = "r,sup_estimate,ratio\n";
    for (const auto& row : scan.rows)
      csv += fmt(row.r) + "," + fmt(row.sup_estimate) + "," + fmt(row.ratio) + "\n";
    run.write("fp_scan.csv", csv);
    run.report["verdicts"] = {{"straddles", scan.straddles}};
  } else {
    double rho = need_num(cfg, "config", "rho");
    FpReport rep = find_fixed_point(spec, rho, opt_int(cfg, "budget", 8), seed);
    json jr = {{"rho", rep.rho},
               {"phi_hat", rep.phi_hat},
               {"below_half", rep.below_half},
               {"found", rep.found}};
    if (rep.below_half) {
      jr["x"] = vec_to_json(rep.x);
      jr["fp_residual"] = rep.fp_residual;
      jr["norm_ok"] = rep.norm_ok;
      run.report["certificates"].push_back({{"kind", "fixed_point"},
                                            {"x", vec_to_json(rep.x)},
                                            {"rho", rep.rho},
                                            {"fp_residual", rep.fp_residual}});
      if (!rep.found) rc = 4;
    }
    run.write("fixed_point.json", jr.dump(2) + "\n");
    run.report["fixed_point"] = jr;
  }
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return rc;
}

// ---------------------------------------------------------------- check ---

json verdict_to_json(const Verdict& v) {
  json w = json::array();
  for (const auto& wit : v.witnesses)
    w.push_back({{"x", wit.x},
                 {"xi", wit.xi},
                 {"lhs", wit.lhs},
                 {"rhs", wit.rhs},
                 {"note", wit.note}});
  json metrics = json::object();
  for (const auto& [k, val] : v.metrics) metrics[k] = val;
  return {{"status", to_string(v.status)},
          {"method", v.method},
          {"detail", v.detail},
          {"metrics", metrics},
          {"witnesses", w}};
}

json run_one_check(const json& c, const std::string& path) {
  std::string kind = need(c, path, "kind").get<std::string>();
  if (kind == "growth") {
    reject_unknown(c, path, {"id", "kind", "f", "a", "q", "n"});
    return verdict_to_json(check_growth(parse_expr(c, path, "f"),
                                        need_num(c, path, "a"),
                                        need_num(c, path, "q"),
                                        opt_int(c, "n", 1)));
  }
  if (kind == "ar") {
    reject_unknown(c, path, {"id", "kind", "f", "c", "r"});
    return verdict_to_json(check_ar(parse_expr(c, path, "f"),
                                    need_num(c, path, "c"),
                                    need_num(c, path, "r")));
  }
  if (kind == "limit0") {
    reject_unknown(c, path, {"id", "kind", "f"});
    return verdict_to_json(check_limit_zero(parse_expr(c, path, "f")));
  }
  if (kind == "thm7") {
    reject_unknown(c, path, {"id", "kind", "f", "g", "s", "q", "D", "B", "decades"});
    auto iv = [&](const char* key, Interval def) {
      if (!c.contains(key)) return def;
      auto v = c.at(key).get<std::vector<double>>();
      return Interval{v.at(0), v.at(1)};
    };
    Thm7Verdict v = check_thm7(parse_expr(c, path, "f"), parse_expr(c, path, "g"),
                               need_num(c, path, "s"), need_num(c, path, "q"),
                               iv("D", {0.0, 1.0}), iv("B", {0.25, 0.75}),
                               opt_int(c, "decades", 16));
    return {{"i", verdict_to_json(v.cond_i)},
            {"ii", verdict_to_json(v.cond_ii)},
            {"iii", verdict_to_json(v.cond_iii)},
            {"positivity", verdict_to_json(v.positivity)}};
  }
  if (kind == "osc" || kind == "osc_no_ratio") {
    reject_unknown(c, path,
                   {"id", "kind", "f", "p", "a_gen", "b_gen", "a", "b",
                    "horizon", "to_zero"});
    int horizon = opt_int(c, "horizon", 8);
    bool to_zero = c.contains("to_zero") && c.at("to_zero").get<bool>();
    SequencePair seqs;
    if (c.contains("a")) {
      seqs.a = c.at("a").get<std::vector<double>>();
      seqs.b = c.at("b").get<std::vector<double>>();
      seqs.to_zero = to_zero;
    } else {
      seqs = sequences_from_exprs(parse_expr(c, path, "a_gen"),
                                  parse_expr(c, path, "b_gen"), horizon, to_zero);
    }
    OscVerdict v = check_osc(parse_expr(c, path, "f"), seqs,
                             need_num(c, path, "p"), horizon);
    json out = {{"sequences_valid", verdict_to_json(v.seq_valid)},
                {"sup_condition", verdict_to_json(v.sup_cond)},
                {"growth", verdict_to_json(v.growth)}};
    if (kind == "osc_no_ratio")
      out["ratio_condition"] = "dropped";
    else
      out["ratio_condition"] = verdict_to_json(v.ratio_zero);
    return out;
  }
  if (kind == "gside") {
    reject_unknown(c, path, {"id", "kind", "g", "p", "to_zero"});
    GSideVerdict v = check_g_side(parse_expr(c, path, "g"),
                                  need_num(c, path, "p"),
                                  c.contains("to_zero") && c.at("to_zero").get<bool>());
    return {{"sup_condition", verdict_to_json(v.sup_cond)},
            {"liminf_condition", verdict_to_json(v.liminf_cond)}};
  }
  if (kind == "suggest") {
    reject_unknown(c, path, {"id", "kind", "f", "p", "to_zero", "horizon"});
    std::string diag;
    SequencePair s = suggest_sequences(
        parse_expr(c, path, "f"), need_num(c, path, "p"),
        c.contains("to_zero") && c.at("to_zero").get<bool>(),
        opt_int(c, "horizon", 8), &diag);
    return {{"a", s.a}, {"b", s.b}, {"diagnostic", diag}};
  }
  throw ConfigError(path + ".kind: unknown check kind '" + kind + "'");
}

int cmd_check(const json& cfg, const std::string& out_dir, std::uint64_t seed) {
  reject_unknown(cfg, "config", {"checks", "seed"});
  const json& checks = need(cfg, "config", "checks");
  if (!checks.is_array()) throw ConfigError("config.checks: expected array");
  Run run = open_run(out_dir, "check", cfg, seed);
  json verdicts = json::object();
  for (std::size_t i = 0; i < checks.size(); ++i) {
    std::string path = "config.checks[" + std::to_string(i) + "]";
    std::string id = need(checks[i], path, "id").get<std::string>();
    verdicts[id] = run_one_check(checks[i], path);
  }
  run.write("check.json", verdicts.dump(2) + "\n");
  run.report["verdicts"] = verdicts;
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return 0;
}

// --------------------------------------------------------- mountain pass ---

EnergyPair surface_pair(const Expr& e) {
  // 2-D landscape: `x` is the first coordinate, `xi` the second
  EnergyPair pair;
  pair.dim = 2;
  pair.x0 = Vec::Zero(2);
  pair.phi = [e](const Vec& v) { return e.eval(v[0], v[1]); };
  pair.grad_phi = [e](const Vec& v) {
    Vec g(2);
    double h0 = 1e-7 * std::max(1.0, std::fabs(v[0]));
    double h1 = 1e-7 * std::max(1.0, std::fabs(v[1]));
    g[0] = (e.eval(v[0] + h0, v[1]) - e.eval(v[0] - h0, v[1])) / (2 * h0);
    g[1] = (e.eval(v[0], v[1] + h1) - e.eval(v[0], v[1] - h1)) / (2 * h1);
    return g;
  };
  pair.psi = [](const Vec&) { return 0.0; };
  pair.grad_psi = [](const Vec& v) { return Vec(Vec::Zero(v.size())); };
  pair.box_radius = [](double) { return 1e6; };
  return pair;
}

int cmd_mountain_pass(const json& cfg, const std::string& out_dir,
                      std::uint64_t seed) {
  reject_unknown(cfg, "config",
                 {"problem", "surface", "mu", "end_a", "end_b", "end_scale",
                  "path_points", "sweeps", "seed"});
  Run run = open_run(out_dir, "mountain-pass", cfg, seed);

  MountainPassOptions opts;
  opts.path_points = opt_int(cfg, "path_points", 33);
  opts.sweeps = opt_int(cfg, "sweeps", 400);

  BuiltPair built;
  double mu;
  Vec end_a, end_b;
  if (cfg.contains("surface")) {
    built.pair = surface_pair(parse_expr(cfg, "config", "surface"));
    mu = 0.0;
    end_a = vec_from_json(need(cfg, "config", "end_a"));
    end_b = vec_from_json(need(cfg, "config", "end_b"));
  } else {
    built = build_problem(need(cfg, "config", "problem"), "config.problem");
    if (!built.model) throw ConfigError("config.problem: expected a FEM problem");
    mu = opt_num(cfg, "mu", 0.5);
    opts.grad_tol = 1e-6;
    end_a = Vec::Zero(built.pair.dim);
    double scale = opt_num(cfg, "end_scale", 8.0);
    end_b.resize(built.pair.dim);
    for (int i = 0; i < built.pair.dim; ++i) {
      double x = built.space->mesh.nodes[built.space->bc == Bc::Dirichlet ? i + 1 : i];
      end_b[i] = built.space->bc == Bc::Dirichlet ? scale * std::sin(M_PI * x) : scale;
    }
  }

  MountainPassResult res = mountain_pass(built.pair, mu, end_a, end_b, opts);
  std::string csv = "index,energy\n";
  for (std::size_t i = 0; i < res.elevation.size(); ++i)
    csv += std::to_string(i) + "," + fmt(res.elevation[i]) + "\n";
  run.write("mountain_pass.csv", csv);

  json jr = {{"energy", res.energy},
             {"grad_sup", res.grad_sup},
             {"residual", res.residual},
             {"success", res.success},
             {"collapsed", res.collapsed}};
  if (built.model) {
    run.write("minimax.csv", discrete_fn_to_csv(DiscreteFn(built.space, res.minimax)));
    jr["file"] = "minimax.csv";
  } else {
    jr["x"] = vec_to_json(res.minimax);
  }
  run.report["minimax"] = jr;
  if (!res.collapsed && res.success) {
    json cert = {{"kind", "local_min"},  // same replay: energy + gradient
                 {"mu", mu},
                 {"rho", 0.0},
                 {"energy", res.energy},
                 {"grad_sup", res.grad_sup},
                 {"residual", res.residual}};
    if (built.model)
      cert["file"] = "minimax.csv";
    else
      cert["x"] = vec_to_json(res.minimax);
    run.report["certificates"].push_back(cert);
  }
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return res.success || res.collapsed ? 0 : 4;
}

// -------------------------------------------------------------- problems ---

int cmd_problem1(const json& cfg, const std::string& out_dir, std::uint64_t seed) {
  reject_unknown(cfg, "config",
                 {"problem", "rho_grid", "rho_values", "budget", "ar", "seed"});
  const json& prob = need(cfg, "config", "problem");
  BuiltPair built = build_problem(prob, "config.problem");
  if (!built.model || !built.model->dirichlet())
    throw ConfigError("config.problem: expected a Dirichlet FEM problem");
  std::vector<double> rhos = build_rho_grid(cfg, "config");
  Run run = open_run(out_dir, "problem1", cfg, seed);

  // applicability cross-check (superlinearity + small-argument behavior)
  Expr f = Expr::parse(prob.at("f").get<std::string>());
  double c = 4.0, r = 1.0;
  if (cfg.contains("ar")) {
    reject_unknown(cfg.at("ar"), "config.ar", {"c", "r"});
    c = opt_num(cfg.at("ar"), "c", 4.0);
    r = opt_num(cfg.at("ar"), "r", 1.0);
  }
  Verdict ar = check_ar(f, c, r);
  Verdict lim = check_limit_zero(f);
  run.report["hypotheses"] = {{"ar", verdict_to_json(ar)},
                              {"limit_zero", verdict_to_json(lim)}};
  if (!ar.ok() || !lim.ok()) {
    run.report["answer"] = "not-applicable";
    run.finish();
    std::printf("%s\n", run.dir.string().c_str());
    return 0;
  }

  int budget = opt_int(cfg, "budget", 8);
  std::vector<PhiCurvePoint> pts;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    PhiCurvePoint pt = phi_of_rho(built.pair, rhos[i], budget, splitmix64(seed + i));
    if (pt.phi_hat < best) {
      best = pt.phi_hat;
      best_i = i;
    }
    pts.push_back(std::move(pt));
  }
  run.write("phi_curve.csv", phi_curve_csv(built.pair, pts));
  run.report["certificates"].push_back(quotient_certificate(pts[best_i]));
  run.report["min_phi_hat"] = best;
  run.report["min_phi_rho"] = rhos[best_i];
  // upper-bound evidence only: phi_hat estimates the infimum from above
  run.report["answer"] = best < 0.5 ? "evidence-below-half" : "no-evidence";
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return 0;
}

int cmd_problem3(const json& cfg, const std::string& out_dir, std::uint64_t seed) {
  reject_unknown(cfg, "config",
                 {"problem", "mu", "direction", "ladder", "budget", "stagnation",
                  "osc", "seed"});
  BuiltPair built = build_problem(need(cfg, "config", "problem"), "config.problem");
  Run run = open_run(out_dir, "problem3", cfg, seed);

  json osc = need(cfg, "config", "osc");
  osc["kind"] = "osc_no_ratio";
  osc["id"] = "thm8.osc";
  run.report["conditions"] = run_one_check(osc, "config.osc");

  double mu = 1.0;
  HuntReport rep = run_hunt_from_config(cfg, built, seed, &mu);
  emit_hunt_artifacts(run, built, rep, mu);
  run.finish();
  std::printf("%s\n", run.dir.string().c_str());
  return 0;
}

// --------------------------------------------------------------- verify ---

int cmd_verify(const std::string& config_path) {
  fs::path dir = fs::path(config_path).parent_path();
  std::ifstream cs(config_path), rs(dir / "report.json");
  if (!cs || !rs) throw ConfigError("verify: run directory incomplete");
  json cfg = json::parse(cs);
  json report = json::parse(rs);

  BuiltPair built;
  bool have_pair = false;
  if (cfg.contains("problem")) {
    built = build_problem(cfg.at("problem"), "config.problem");
    have_pair = true;
  }
  BranchModel branch_model;
  bool have_model = cfg.contains("model");
  if (have_model)
    branch_model = build_branch_model(cfg.at("model"), "config.model");
  PotentialSpec potential;
  if (cfg.contains("potential"))
    potential = build_potential(cfg.at("potential"), "config.potential");

  auto load_fn = [&](const std::string& name, const FeSpacePtr& space) {
    std::ifstream f(dir / name);
    std::ostringstream os;
    os << f.rdbuf();
    return discrete_fn_from_csv(space, os.str());
  };

  int failures = 0;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      std::fprintf(stderr, "verify: FAILED %s\n", what.c_str());
    }
  };
  auto close = [](double a, double b, double tol) {
    return std::fabs(a - b) <= tol * (1.0 + std::fabs(b));
  };

  for (const json& cert : report.at("certificates")) {
    std::string kind = cert.at("kind").get<std::string>();
    if (kind == "quotient") {
      if (!have_pair) continue;
      double rho = cert.at("rho"), m_hat = cert.at("m_hat"),
             phi_hat = cert.at("phi_hat");
      Vec x = vec_from_json(cert.at("x"));
      Vec infx = vec_from_json(cert.at("infx"));
      expect(close(quotient_at(built.pair, x, rho, m_hat), phi_hat, 1e-8),
             "quotient recomputation at rho=" + fmt(rho));
      expect(built.pair.psi(infx) <= rho * (1.0 + 1e-9) &&
                 built.pair.phi(infx) <= m_hat + 1e-8 * (1.0 + std::fabs(m_hat)),
             "sublevel infimum certificate at rho=" + fmt(rho));
    } else if (kind == "local_min") {
      if (!have_pair) continue;
      double mu = cert.at("mu");
      Vec x = cert.contains("file")
                  ? Vec(load_fn(cert.at("file"), built.space).coeffs)
                  : vec_from_json(cert.at("x"));
      expect(close(built.pair.energy(x, mu), cert.at("energy").get<double>(), 1e-8),
             "energy recomputation");
      expect(close(built.pair.grad_energy(x, mu).lpNorm<Eigen::Infinity>(),
                   cert.at("grad_sup").get<double>(), 1e-6),
             "gradient recomputation");
      if (built.model && cert.at("residual").get<double>() >= 0.0)
        expect(close(built.model->residual(
                         DiscreteFn(built.space, x),
                         FemBacking{built.model, built.space}.residual_scale(mu)),
                     cert.at("residual").get<double>(), 1e-8),
               "weak-form residual recomputation");
    } else if (kind == "branch_point") {
      if (!have_model) continue;
      auto space = std::make_shared<const FeSpace>(FeSpace{
          Mesh1D::uniform(branch_model.elements), Bc::Dirichlet, 4});
      DiscreteFn u = load_fn(cert.at("file"), space);
      double lam = cert.at("lambda");
      expect(close(branch_energy(branch_model, lam, u),
                   cert.at("energy").get<double>(), 1e-10),
             "branch energy at lambda=" + fmt(lam));
      expect(close(branch_residual(branch_model, lam, u),
                   cert.at("residual").get<double>(), 1e-8),
             "branch residual at lambda=" + fmt(lam));
      NormReport nrm = norms(u, 2.0);
      double ratio = nrm.c1proxy /
                     std::pow(lam, branch_model.q / (1.0 - branch_model.q));
      expect(close(ratio, cert.at("ratio").get<double>(), 1e-10),
             "branch ratio at lambda=" + fmt(lam));
      auto vals = u.nodal_values();
      expect(*std::min_element(vals.begin(), vals.end()) >= -1e-10,
             "branch non-negativity at lambda=" + fmt(lam));
    } else if (kind == "fixed_point") {
      if (!potential.P) continue;
      Vec x = vec_from_json(cert.at("x"));
      double res = (potential.A(x) - x).norm();
      expect(close(res, cert.at("fp_residual").get<double>(), 1e-8),
             "fixed-point residual recomputation");
      expect(x.squaredNorm() < cert.at("rho").get<double>(),
             "fixed-point norm bound");
    }
  }
  std::printf("verify: %d certificate failure(s)\n", failures);
  return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"variational-principle laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs";
  std::uint64_t seed = 1;
  bool seed_given = false;
  int jobs = 1;

  std::vector<std::pair<std::string, int (*)(const json&, const std::string&,
                                             std::uint64_t)>>
      commands = {{"phi-curve", cmd_phi_curve},   {"hunt", cmd_hunt},
                  {"bifurcate", cmd_bifurcate},   {"fixed-point", cmd_fixed_point},
                  {"check", cmd_check},           {"mountain-pass", cmd_mountain_pass},
                  {"problem1", cmd_problem1},     {"problem3", cmd_problem3}};

  for (auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path)->required();
    sub->add_option("--out", out_dir);
    sub->add_option("--seed", seed)->each([&](const std::string&) {
      seed_given = true;
    });
    sub->add_option("--jobs", jobs);
  }
  CLI::App* verify = app.add_subcommand("verify");
  verify->add_option("--config", config_path)->required();
  verify->add_option("--jobs", jobs);

  CLI11_PARSE(app, argc, argv);

  try {
    set_jobs(std::max(jobs, 1));
    if (app.got_subcommand("verify")) return cmd_verify(config_path);

    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config file: " + config_path);
    json cfg;
    try {
      cfg = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!seed_given && cfg.is_object() && cfg.contains("seed"))
      seed = cfg.at("seed").get<std::uint64_t>();

    for (auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(cfg, out_dir, seed);
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "expression error at offset %zu: %s\n", e.offset(),
                 e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 4;
  }
}
