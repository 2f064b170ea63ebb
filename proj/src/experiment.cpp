#include "reclab/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include "reclab/ball.hpp"
#include "reclab/csv.hpp"
#include "reclab/measure.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/survival.hpp"
#include "reclab/version.hpp"

namespace reclab {

namespace {

const std::set<std::string> kKinds = {"survival", "escape-rate", "theta",      "lcurve",
                                      "lzero",    "union-check", "hypotheses", "phi",
                                      "ball",     "product-relation"};

Rat json_rational(const Json& v, const std::string& what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long long>());
  if (v.is_number_float()) return rational_from_double_text(v.get<double>());
  throw ConfigError(what + ": expected a rational (string or number)");
}

Json echo_rational(const Rat& r) { return rat_string(r); }

struct Context {
  Json config;
  SymbolicSystem system = SymbolicSystem::full_shift(2);
  MeasureModel mu = MeasureModel::bernoulli({Rat(1, 2), Rat(1, 2)});
  ChainBuildOptions build;
  EngineOptions engine;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::uint64_t master_seed = 1;
  bool exact = false;
  double extrap_tol = 1e-3;
  double theta_tol = 1e-9;
};

SymbolicSystem parse_system(const Json& cfg) {
  const auto& sys = cfg.at("system");
  int a = sys.at("alphabet_size").get<int>();
  if (sys.contains("transition_matrix") && !sys.at("transition_matrix").is_null()) {
    std::vector<std::vector<int>> t;
    for (const auto& row : sys.at("transition_matrix")) t.push_back(row.get<std::vector<int>>());
    return SymbolicSystem::sft(a, std::move(t));
  }
  return SymbolicSystem::full_shift(a);
}

MeasureModel parse_measure(const Json& cfg, const SymbolicSystem& system) {
  const auto& m = cfg.at("measure");
  std::string kind = m.at("kind").get<std::string>();
  if (kind == "bernoulli") {
    std::vector<Rat> probs;
    for (const auto& p : m.at("probs")) probs.push_back(json_rational(p, "measure.probs"));
    if (static_cast<int>(probs.size()) != system.alphabet_size())
      throw ConfigError("measure.probs length must equal alphabet_size");
    return MeasureModel::bernoulli(std::move(probs));
  }
  if (kind == "markov") {
    std::vector<std::vector<Rat>> P;
    for (const auto& row : m.at("P")) {
      std::vector<Rat> r;
      for (const auto& p : row) r.push_back(json_rational(p, "measure.P"));
      P.push_back(std::move(r));
    }
    std::vector<Rat> pi;
    if (m.contains("pi") && !m.at("pi").is_null())
      for (const auto& p : m.at("pi")) pi.push_back(json_rational(p, "measure.pi"));
    return MeasureModel::markov(system, std::move(P), std::move(pi));
  }
  throw ConfigError("measure.kind must be 'bernoulli' or 'markov'");
}

PointSpec parse_point(const Json& cfg, const SymbolicSystem& system) {
  const auto& pt = cfg.at("point");
  std::string kind = pt.at("kind").get<std::string>();
  PointSpec z = [&] {
    if (kind == "periodic") {
      Word period = Word::from_string(pt.at("period").get<std::string>());
      Word pre;
      if (pt.contains("preperiod") && !pt.at("preperiod").is_null())
        pre = Word::from_string(pt.at("preperiod").get<std::string>());
      return PointSpec::periodic(period.symbols, pre.symbols);
    }
    if (kind == "stream")
      return PointSpec::stream(pt.at("generator").get<std::string>(),
                               pt.at("seed").get<std::uint64_t>());
    throw ConfigError("point.kind must be 'periodic' or 'stream'");
  }();
  z.validate(system);
  return z;
}

HoleSpec parse_hole(const Json& cfg, const SymbolicSystem& system) {
  const auto& h = cfg.at("hole");
  std::vector<Word> words;
  for (const auto& w : h.at("words")) words.push_back(Word::from_string(w.get<std::string>()));
  return HoleSpec::normalized(std::move(words), system);
}

NRange parse_n_range(const Json& cfg) {
  NRange r;
  r.lo = cfg.at("grids").at("n_lo").get<int>();
  r.hi = cfg.at("grids").at("n_hi").get<int>();
  if (r.lo < 1 || r.hi < r.lo) throw ConfigError("grids: need 1 <= n_lo <= n_hi");
  return r;
}

Side parse_side(const Json& v) {
  std::string s = v.get<std::string>();
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw ConfigError("side must be 'left' or 'right'");
}

void set_default(Json& obj, const std::string& key, const Json& value) {
  if (!obj.contains(key) || obj.at(key).is_null()) obj[key] = value;
}

Json survival_json(const Rat& v, bool exact) {
  if (exact) return echo_rational(v);
  return to_double(v);
}

}  // namespace

Json normalize_config(const Json& raw) {
  if (!raw.is_object()) throw ConfigError("config must be a JSON object");
  Json cfg = raw;
  if (!cfg.contains("kind")) throw ConfigError("config.kind is required");
  std::string kind = cfg.at("kind").get<std::string>();
  if (!kKinds.count(kind)) throw ConfigError("unknown experiment kind: '" + kind + "'");

  set_default(cfg, "mode", "float");
  std::string mode = cfg.at("mode").get<std::string>();
  if (mode != "exact" && mode != "float") throw ConfigError("mode must be 'exact' or 'float'");

  set_default(cfg, "system", Json::object());
  set_default(cfg["system"], "alphabet_size", 2);
  set_default(cfg["system"], "transition_matrix", Json());

  set_default(cfg, "measure", Json({{"kind", "bernoulli"}, {"probs", {"1/2", "1/2"}}}));
  set_default(cfg, "point", Json({{"kind", "periodic"}, {"period", "0"}, {"preperiod", ""}}));

  set_default(cfg, "grids", Json::object());
  auto& grids = cfg["grids"];
  set_default(grids, "n_lo", 2);
  set_default(grids, "n_hi", 12);
  set_default(grids, "t_max", 32);
  set_default(grids, "k_max", 16);
  set_default(grids, "period", 1);
  set_default(grids, "alpha", Json::array({1.0}));
  set_default(grids, "s", Json::array({1.0}));
  set_default(grids, "s_range", Json::array({25, 50, 100, 200, 400}));
  set_default(grids, "union_n", 2);
  set_default(grids, "union_k", 2);
  set_default(grids, "r_schedule", Json::array({"1/8", "1/16", "1/32", "1/64", "1/128", "1/256", "1/512"}));

  set_default(cfg, "params", Json::object());
  auto& params = cfg["params"];
  set_default(params, "eps", 0.5);
  set_default(params, "beta", 0.9);
  set_default(params, "K", 0.5);
  set_default(params, "xi", 0.5);
  set_default(params, "a_const", 0.5);
  set_default(params, "phi_side", "left");
  set_default(params, "delta", 4);
  set_default(params, "k", 5);
  set_default(params, "relation_s", 24);
  set_default(params, "relation_t", Json());
  set_default(params, "v", 2);
  set_default(params, "coding_q0", "1/2");
  set_default(params, "ball_center", "0");
  set_default(params, "ball_alpha", 1.0);
  set_default(params, "ball_s", 1.0);
  set_default(params, "ball_period", 1);

  set_default(cfg, "seeds", Json::object());
  set_default(cfg["seeds"], "master_seed", 1);

  set_default(cfg, "caps", Json::object());
  auto& caps = cfg["caps"];
  set_default(caps, "enumeration_cap", static_cast<std::uint64_t>(kDefaultEnumerationCap));
  set_default(caps, "state_cap", static_cast<std::uint64_t>(kDefaultStateCap));
  set_default(caps, "dense_power_cap", 512);
  set_default(caps, "iterate_horizon", static_cast<std::uint64_t>(1u << 20));

  set_default(cfg, "tolerances", Json::object());
  auto& tols = cfg["tolerances"];
  set_default(tols, "escape_tol", 1e-12);
  set_default(tols, "extrapolation_tol", 1e-3);
  set_default(tols, "theta_tol", 1e-9);

  set_default(cfg, "mc", Json::object());
  set_default(cfg["mc"], "trials", 100000);
  set_default(cfg["mc"], "t_max", 30);
  set_default(cfg["mc"], "ball_trials", 0);
  set_default(cfg["mc"], "cross", false);

  return cfg;
}

namespace {

Context make_context(const Json& cfg) {
  Context ctx;
  ctx.config = cfg;
  ctx.system = parse_system(cfg);
  ctx.mu = parse_measure(cfg, ctx.system);
  ctx.exact = cfg.at("mode").get<std::string>() == "exact";
  ctx.enumeration_cap = cfg.at("caps").at("enumeration_cap").get<std::uint64_t>();
  ctx.build.state_cap = cfg.at("caps").at("state_cap").get<std::size_t>();
  ctx.engine.dense_power_cap = cfg.at("caps").at("dense_power_cap").get<int>();
  ctx.engine.iterate_horizon = cfg.at("caps").at("iterate_horizon").get<std::uint64_t>();
  ctx.engine.escape_tol = cfg.at("tolerances").at("escape_tol").get<double>();
  ctx.extrap_tol = cfg.at("tolerances").at("extrapolation_tol").get<double>();
  ctx.theta_tol = cfg.at("tolerances").at("theta_tol").get<double>();
  ctx.master_seed = cfg.at("seeds").at("master_seed").get<std::uint64_t>();
  return ctx;
}

void run_survival(Context& ctx, RunOutcome& out) {
  auto hole = parse_hole(ctx.config, ctx.system);
  int t_max = ctx.config.at("grids").at("t_max").get<int>();
  OpenChain chain = compile_hole(ctx.system, ctx.mu, hole, ctx.build);
  auto curve = survival_curve(numeric_chain<Rat>(chain), static_cast<std::uint64_t>(t_max));

  CsvWriter csv({"t", "survival", "log_survival"});
  Json values = Json::array();
  for (int t = 0; t <= t_max; ++t) {
    const Rat& v = curve[static_cast<std::size_t>(t)];
    double d = to_double(v);
    csv.row({std::to_string(t), ctx.exact ? rat_string(v) : double_repr(d),
             double_repr(std::log(d))});
    values.push_back(survival_json(v, ctx.exact));
  }
  out.csv_files.emplace_back("survival.csv", csv.render());
  out.record["results"] = {{"hole_measure", echo_rational(chain.hole_measure)},
                           {"states", chain.num_states},
                           {"t_max", t_max},
                           {"survival", values}};
}

void run_escape_rate(Context& ctx, RunOutcome& out) {
  auto hole = parse_hole(ctx.config, ctx.system);
  OpenChain chain = compile_hole(ctx.system, ctx.mu, hole, ctx.build);
  auto res = escape_rate(numeric_chain<double>(chain), ctx.engine);
  Json words = Json::array();
  for (const auto& w : hole.cylinders) words.push_back(w.str());
  out.record["results"] = {{"hole", words},
                           {"mu_U", echo_rational(chain.hole_measure)},
                           {"rho", res.rho},
                           {"lambda", res.lambda},
                           {"iterations", res.iterations},
                           {"slope_estimate", res.slope_estimate},
                           {"slope_t", res.slope_t}};
}

void run_theta(Context& ctx, RunOutcome& out) {
  auto z = parse_point(ctx.config, ctx.system);
  int p = ctx.config.at("grids").at("period").get<int>();
  auto est = theta(z, p, ctx.mu, ctx.system, parse_n_range(ctx.config), ctx.theta_tol);
  CsvWriter csv({"n", "ratio"});
  Json per_n = Json::array();
  for (const auto& [n, ratio] : est.per_n) {
    csv.row({std::to_string(n), double_repr(to_double(ratio))});
    per_n.push_back({{"n", n}, {"ratio", echo_rational(ratio)}});
  }
  out.csv_files.emplace_back("theta.csv", csv.render());
  out.record["results"] = {{"period", est.period},
                           {"per_n", per_n},
                           {"limit", echo_rational(est.limit)},
                           {"limit_double", to_double(est.limit)},
                           {"converged", est.converged},
                           {"below_half", est.below_half}};
  if (!est.below_half)
    out.record["warnings"].push_back("theta is not below 1/2: outside the dichotomy hypothesis");
}

void run_lcurve(Context& ctx, RunOutcome& out) {
  auto z = parse_point(ctx.config, ctx.system);
  auto n_range = parse_n_range(ctx.config);
  Json results = Json::array();
  for (const auto& aj : ctx.config.at("grids").at("alpha")) {
    double alpha = aj.get<double>();
    for (const auto& sj : ctx.config.at("grids").at("s")) {
      double s = sj.get<double>();
      auto curve = l_alpha_s(z, alpha, s, ctx.mu, ctx.system, n_range, ctx.engine, ctx.build,
                             ctx.extrap_tol);
      std::string name = "lcurve_a" + double_repr(alpha) + "_s" + double_repr(s) + ".csv";
      CsvWriter csv({"n", "t", "mu_n", "value", "bracket_low", "bracket_high"});
      Json per_n = Json::array();
      for (const auto& pt : curve.per_n) {
        csv.row({std::to_string(pt.n), std::to_string(pt.t), double_repr(pt.mu_n),
                 double_repr(pt.value), double_repr(curve.extrapolated.lo),
                 double_repr(curve.extrapolated.hi)});
        per_n.push_back({{"n", pt.n}, {"t", pt.t}, {"mu_n", pt.mu_n}, {"value", pt.value}});
      }
      out.csv_files.emplace_back(name, csv.render());
      Json entry = {{"alpha", alpha},
                    {"s", s},
                    {"per_n", per_n},
                    {"extrapolated", curve.extrapolated.limit},
                    {"bracket", {curve.extrapolated.lo, curve.extrapolated.hi}},
                    {"converged", curve.extrapolated.converged},
                    {"accelerated", curve.extrapolated.accelerated},
                    {"partial", curve.partial}};
      results.push_back(entry);
      for (const auto& w : curve.warnings) out.record["warnings"].push_back(w);
      if (curve.partial) out.partial = true;
    }
  }
  out.record["results"] = {{"curves", results}};
}

void run_lzero(Context& ctx, RunOutcome& out) {
  auto z = parse_point(ctx.config, ctx.system);
  auto res = l_zero(z, ctx.config.at("grids").at("s_range").get<std::vector<int>>(), ctx.mu,
                    ctx.system, parse_n_range(ctx.config), ctx.engine, ctx.build, ctx.extrap_tol);
  CsvWriter csv({"s", "inner_value", "n_used", "stabilized", "bound_low", "bound_high"});
  Json rows = Json::array();
  for (const auto& r : res.rows) {
    csv.row({std::to_string(r.s), double_repr(r.inner_value), std::to_string(r.n_used),
             r.stabilized ? "1" : "0", r.bound_lo ? double_repr(*r.bound_lo) : "",
             r.bound_hi ? double_repr(*r.bound_hi) : ""});
    Json row = {{"s", r.s},
                {"inner_value", r.inner_value},
                {"n_used", r.n_used},
                {"stabilized", r.stabilized}};
    if (r.bound_lo) row["bound_low"] = *r.bound_lo;
    if (r.bound_hi) row["bound_high"] = *r.bound_hi;
    rows.push_back(row);
  }
  out.csv_files.emplace_back("lzero.csv", csv.render());
  out.record["results"] = {{"rows", rows},
                           {"outer_limit", res.outer.limit},
                           {"bracket", {res.outer.lo, res.outer.hi}},
                           {"converged", res.outer.converged}};
}

void run_union_check(Context& ctx, RunOutcome& out) {
  auto z = parse_point(ctx.config, ctx.system);
  int p = ctx.config.at("grids").at("period").get<int>();
  int n = ctx.config.at("grids").at("union_n").get<int>();
  int k = ctx.config.at("grids").at("union_k").get<int>();
  auto rep = union_measure_check(z, p, n, k, ctx.mu, ctx.system, ctx.enumeration_cap);
  out.record["results"] = {{"n", n},
                           {"k", k},
                           {"period", p},
                           {"exact", echo_rational(rep.exact)},
                           {"prediction", echo_rational(rep.prediction)},
                           {"defect", echo_rational(rep.defect)},
                           {"defect_double", to_double(rep.defect)},
                           {"aligned", rep.aligned}};
  if (!rep.aligned)
    out.record["warnings"].push_back(
        "k p > n: shifted copies do not chain-overlap; the identity is only asymptotic here");
}

void run_hypotheses(Context& ctx, RunOutcome& out) {
  auto z = parse_point(ctx.config, ctx.system);
  const auto& pj = ctx.config.at("params");
  HypothesisParams params;
  params.eps = pj.at("eps").get<double>();
  params.beta = pj.at("beta").get<double>();
  params.K = pj.at("K").get<double>();
  params.xi = pj.at("xi").get<double>();
  params.a_const = pj.at("a_const").get<double>();
  params.side = parse_side(pj.at("phi_side"));
  double alpha = ctx.config.at("grids").at("alpha").at(0).get<double>();
  auto rep = check_hypotheses(z, ctx.mu, ctx.system, alpha, parse_n_range(ctx.config), params);
  const char* case_name = rep.mu_case == HypothesisReport::Case::Polynomial ? "polynomial"
                          : rep.mu_case == HypothesisReport::Case::Exponential ? "exponential"
                                                                               : "undetermined";
  out.record["results"] = {
      {"n1", {{"gamma_prime", rep.n1_gamma_prime}, {"K", rep.n1_K}, {"pass", rep.n1_pass}}},
      {"n2",
       {{"applicable", rep.n2_applicable},
        {"max_defect", rep.n2_max_defect},
        {"a_n", rep.n2_a_n},
        {"vectors", rep.n2_vectors},
        {"pass", rep.n2_pass}}},
      {"case", case_name},
      {"b1",
       {{"gamma_prime", rep.b1_gamma_prime},
        {"gamma_second", rep.b1_gamma_second},
        {"m_fitted", rep.b1_m_fitted},
        {"m_required", rep.b1_m_required},
        {"vacuous", rep.b1_vacuous},
        {"pass", rep.b1_pass}}},
      {"b2", {{"xi1", rep.b2_xi1}, {"xi2", rep.b2_xi2}, {"pass", rep.b2_pass}}},
      {"theta",
       {{"applicable", rep.theta_applicable},
        {"value", rep.theta_value},
        {"below_half", rep.theta_below_half}}},
      {"overall_pass", rep.overall_pass},
      {"notes", rep.notes}};
  if (!rep.overall_pass)
    out.record["warnings"].push_back("hypothesis check failed; see results.notes");
}

void run_phi(Context& ctx, RunOutcome& out) {
  int k_max = ctx.config.at("grids").at("k_max").get<int>();
  Side side = parse_side(ctx.config.at("params").at("phi_side"));
  auto prof = build_phi_profile(ctx.mu, k_max, side);
  CsvWriter csv({"k", "phi", "envelope"});
  for (int k = 1; k <= k_max; ++k)
    csv.row({std::to_string(k), double_repr(prof.values[static_cast<std::size_t>(k - 1)]),
             double_repr(prof.envelope[static_cast<std::size_t>(k - 1)])});
  out.csv_files.emplace_back("phi.csv", csv.render());
  const char* kind = prof.fit.kind == DecayFit::Kind::Exponential ? "exponential"
                     : prof.fit.kind == DecayFit::Kind::Polynomial ? "polynomial"
                                                                   : "undetermined";
  out.record["results"] = {{"k_max", k_max},
                           {"side", side == Side::Left ? "left" : "right"},
                           {"classification", kind},
                           {"rate", prof.fit.rate},
                           {"power", prof.fit.power},
                           {"values", prof.values},
                           {"envelope", prof.envelope}};
}

void run_ball(Context& ctx, RunOutcome& out) {
  const auto& pj = ctx.config.at("params");
  Rat center = json_rational(pj.at("ball_center"), "params.ball_center");
  Rat q0 = json_rational(pj.at("coding_q0"), "params.coding_q0");
  std::vector<Rat> schedule;
  for (const auto& r : ctx.config.at("grids").at("r_schedule"))
    schedule.push_back(json_rational(r, "grids.r_schedule"));
  BallLOptions opts;
  opts.v = pj.at("v").get<int>();
  opts.mc_trials = ctx.config.at("mc").at("ball_trials").get<std::uint64_t>();
  opts.master_seed = ctx.master_seed;
  opts.engine = ctx.engine;
  opts.build = ctx.build;
  opts.extrap_tol = ctx.extrap_tol;
  double alpha = pj.at("ball_alpha").get<double>();
  double s = pj.at("ball_s").get<double>();
  auto rep = l_ball(center, schedule, alpha, s, q0, opts);

  CsvWriter csv({"r", "n", "inner_mass", "outer_mass", "L_low", "L_high"});
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    csv.row({rat_string(row.r), std::to_string(row.n), double_repr(to_double(row.inner_mass)),
             double_repr(to_double(row.outer_mass)),
             row.l_low ? double_repr(*row.l_low) : "", double_repr(row.l_high)});
    Json jr = {{"r", rat_string(row.r)},
               {"n", row.n},
               {"inner_mass", echo_rational(row.inner_mass)},
               {"outer_mass", echo_rational(row.outer_mass)},
               {"ball_mass", echo_rational(row.ball_mass)},
               {"t", row.t},
               {"L_high", row.l_high}};
    if (row.l_low) jr["L_low"] = *row.l_low;
    if (row.mc_estimate) {
      jr["mc_estimate"] = *row.mc_estimate;
      jr["mc_inside"] = row.mc_inside;
    }
    rows.push_back(jr);
  }
  out.csv_files.emplace_back("ball.csv", csv.render());
  // theta for periodic centers; skipped when the center is not periodic.
  Json theta_json;
  int ball_p = pj.at("ball_period").get<int>();
  try {
    auto th = theta_ball(center, ball_p, schedule, q0);
    theta_json = {{"period", th.period},
                  {"limit", th.extrapolated.limit},
                  {"below_half", th.below_half}};
  } catch (const ConfigError&) {
    theta_json = Json();
  }
  out.record["results"] = {{"alpha", alpha},
                           {"s", s},
                           {"v", opts.v},
                           {"rows", rows},
                           {"low_extrapolated", rep.low_extrapolated.limit},
                           {"high_extrapolated", rep.high_extrapolated.limit},
                           {"bracket", {rep.low_extrapolated.limit, rep.high_extrapolated.limit}},
                           {"theta_ball", theta_json}};
  for (const auto& w : rep.warnings) out.record["warnings"].push_back(w);
}

void run_product_relation(Context& ctx, RunOutcome& out) {
  auto hole = parse_hole(ctx.config, ctx.system);
  const auto& pj = ctx.config.at("params");
  int s = pj.at("relation_s").get<int>();
  int k = pj.at("k").get<int>();
  int delta = pj.at("delta").get<int>();
  std::optional<std::uint64_t> t;
  if (!pj.at("relation_t").is_null()) t = pj.at("relation_t").get<std::uint64_t>();
  OpenChain chain = compile_hole(ctx.system, ctx.mu, hole, ctx.build);
  auto rep = product_relation_residual(chain, ctx.mu, s, k, delta, t,
                                       parse_side(pj.at("phi_side")));
  out.record["results"] = {{"s", rep.s},
                           {"k", rep.k},
                           {"delta", rep.delta},
                           {"q", rep.q},
                           {"t", rep.t},
                           {"eta", rep.eta},
                           {"delta_bound", echo_rational(rep.delta_bound)},
                           {"lemma_lhs", echo_rational(rep.lemma_lhs)},
                           {"lemma_rhs", echo_rational(rep.lemma_rhs)},
                           {"lemma_pass", rep.lemma_pass},
                           {"kfold_lhs", rep.kfold_lhs},
                           {"kfold_rhs", rep.kfold_rhs},
                           {"kfold_pass", rep.kfold_pass}};
}

McCurve run_mc(Context& ctx) {
  auto hole = parse_hole(ctx.config, ctx.system);
  return monte_carlo_survival(ctx.system, ctx.mu, hole,
                              ctx.config.at("mc").at("t_max").get<int>(),
                              ctx.config.at("mc").at("trials").get<std::uint64_t>(),
                              ctx.master_seed);
}

}  // namespace

RunOutcome run_experiment(const Json& raw) {
  Json cfg = normalize_config(raw);
  Context ctx = make_context(cfg);
  RunOutcome out;
  out.record["artifact"] = kArtifactName;
  out.record["version"] = kArtifactVersion;
  out.record["kind"] = cfg.at("kind");
  out.record["config"] = cfg;
  out.record["warnings"] = Json::array();

  auto start = std::chrono::steady_clock::now();
  std::string kind = cfg.at("kind").get<std::string>();
  if (kind == "survival") {
    run_survival(ctx, out);
    // Monte Carlo cross-curve rides along when requested.
    if (cfg.at("mc").at("cross").get<bool>() && cfg.at("mc").at("trials").get<std::uint64_t>() > 0) {
      auto mc = run_mc(ctx);
      out.record["results"]["mc_survival"] = mc.curve();
      out.record["results"]["mc_trials"] = mc.trials;
      out.record["results"]["mc_t_max"] = mc.t_max;
    }
  } else if (kind == "escape-rate") {
    run_escape_rate(ctx, out);
  } else if (kind == "theta") {
    run_theta(ctx, out);
  } else if (kind == "lcurve") {
    run_lcurve(ctx, out);
  } else if (kind == "lzero") {
    run_lzero(ctx, out);
  } else if (kind == "union-check") {
    run_union_check(ctx, out);
  } else if (kind == "hypotheses") {
    run_hypotheses(ctx, out);
  } else if (kind == "phi") {
    run_phi(ctx, out);
  } else if (kind == "ball") {
    run_ball(ctx, out);
  } else if (kind == "product-relation") {
    run_product_relation(ctx, out);
  }
  auto end = std::chrono::steady_clock::now();
  out.record["wall_time_s"] = std::chrono::duration<double>(end - start).count();
  return out;
}

RunOutcome run_and_write(const Json& config, const std::string& out_dir) {
  RunOutcome out = run_experiment(config);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/record.json");
    if (!f) throw ConfigError("cannot write record to: " + out_dir);
    f << out.record.dump(2) << "\n";
  }
  for (const auto& [name, content] : out.csv_files) {
    std::ofstream f(out_dir + "/" + name);
    if (!f) throw ConfigError("cannot write output file: " + name);
    f << content;
  }
  return out;
}

namespace {

std::string first_divergence(const Json& a, const Json& b, const std::string& path) {
  if (a == b) return {};
  if (a.type() != b.type() || (!a.is_object() && !a.is_array())) return path.empty() ? "/" : path;
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) return path + "/" + it.key();
      auto sub = first_divergence(it.value(), b.at(it.key()), path + "/" + it.key());
      if (!sub.empty()) return sub;
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key())) return path + "/" + it.key();
    return path.empty() ? "/" : path;
  }
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    auto sub = first_divergence(a.at(i), b.at(i), path + "/" + std::to_string(i));
    if (!sub.empty()) return sub;
  }
  return path + "/" + std::to_string(std::min(a.size(), b.size()));
}

}  // namespace

ReplayResult replay_record(const Json& record) {
  if (!record.contains("config")) throw ConfigError("record is missing the config echo");
  RunOutcome rerun = run_experiment(record.at("config"));
  ReplayResult res;
  const Json& before = record.at("results");
  const Json& after = rerun.record.at("results");
  if (before == after) {
    res.match = true;
  } else {
    res.match = false;
    res.first_divergence = first_divergence(before, after, "/results");
  }
  return res;
}

}  // namespace reclab
