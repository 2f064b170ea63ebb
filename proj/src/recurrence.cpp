#include "reclab/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace reclab {

std::string Alpha::str() const { return infinite ? "inf" : double_repr(value); }

ThetaEstimate theta(const PointSpec& z, int p, const MeasureModel& mu,
                    const SymbolicSystem& system, const NRange& n_range, double tol) {
  auto pp = prime_period(z, p, system);
  if (pp.status != PrimePeriodResult::Status::Found || *pp.period != p)
    throw ConfigError("theta requires a point with prime period p");
  ThetaEstimate est;
  est.period = p;
  for (int n : n_range.list()) {
    Word intersected = intersected_cylinder(z, n, p, 1, system);
    Word base = cylinder_around(z, n, system);
    est.per_n.emplace_back(n, mu.cylinder(intersected) / mu.cylinder(base));
  }
  est.limit = est.per_n.back().second;
  est.converged = true;
  const std::size_t m = est.per_n.size();
  Rat rtol = rational_from_double_text(tol);
  for (std::size_t i = m >= 3 ? m - 3 : 0; i + 1 < m; ++i)
    if (rat_abs(est.per_n[i].second - est.per_n[i + 1].second) > rtol) est.converged = false;
  est.below_half = est.limit < Rat(1, 2);
  return est;
}

namespace {

std::uint64_t hitting_time_target(double s, double mu_n, double alpha) {
  double scaled = s * std::pow(mu_n, -alpha);
  if (!(scaled < 9.0e18)) throw CapExceededError("hitting-time horizon overflows");
  return static_cast<std::uint64_t>(std::ceil(scaled));
}

}  // namespace

LCurve l_alpha_s(const PointSpec& z, double alpha, double s, const MeasureModel& mu,
                 const SymbolicSystem& system, const NRange& n_range,
                 const EngineOptions& engine, const ChainBuildOptions& build,
                 double extrap_tol) {
  if (!(alpha > 0.0) || !(s > 0.0)) throw ConfigError("l_alpha_s needs alpha > 0 and s > 0");
  LCurve curve;
  curve.alpha = Alpha::finite(alpha);
  curve.s = s;
  for (int n : n_range.list()) {
    Word cyl = cylinder_around(z, n, system);
    HoleSpec hole = HoleSpec::normalized({cyl}, system);
    try {
      OpenChain chain = compile_hole(system, mu, hole, build);
      auto nchain = numeric_chain<double>(chain);
      LPoint pt;
      pt.n = n;
      pt.mu_n = to_double(chain.hole_measure);
      pt.t = hitting_time_target(s, pt.mu_n, alpha);
      double log_s = log_survival(nchain, pt.t, engine);
      pt.value = -log_s / (s * std::pow(pt.mu_n, 1.0 - alpha));
      curve.per_n.push_back(pt);
    } catch (const CapExceededError& e) {
      curve.partial = true;
      curve.warnings.push_back("n=" + std::to_string(n) + ": " + e.what());
      break;
    }
  }
  if (curve.per_n.size() >= 4) {
    std::vector<double> vals;
    for (const auto& p : curve.per_n) vals.push_back(p.value);
    curve.extrapolated = extrapolate_limit(vals, extrap_tol);
  } else if (!curve.per_n.empty()) {
    curve.extrapolated.limit = curve.per_n.back().value;
    curve.extrapolated.lo = curve.extrapolated.hi = curve.extrapolated.limit;
    curve.warnings.push_back("too few points for extrapolation");
  }
  return curve;
}

LZeroResult l_zero(const PointSpec& z, const std::vector<int>& s_range, const MeasureModel& mu,
                   const SymbolicSystem& system, const NRange& n_range,
                   const EngineOptions& engine, const ChainBuildOptions& build,
                   double extrap_tol) {
  if (s_range.empty()) throw ConfigError("l_zero needs a non-empty s range");
  for (std::size_t i = 0; i + 1 < s_range.size(); ++i)
    if (s_range[i + 1] <= s_range[i]) throw ConfigError("s range must be increasing");

  auto pp = prime_period(z, 64, system);
  int p = pp.status == PrimePeriodResult::Status::Found ? *pp.period : 0;

  LZeroResult result;
  // Inner limit over n at fixed s: survival tends to 1, so the values carry
  // geometrically shrinking corrections; the shared extrapolation rule takes
  // the limit.
  auto inner_at = [&](int s) -> std::pair<double, std::pair<int, bool>> {
    std::vector<double> values;
    int used = 0;
    for (int n : n_range.list()) {
      HoleSpec hole = HoleSpec::normalized({cylinder_around(z, n, system)}, system);
      OpenChain chain = compile_hole(system, mu, hole, build);
      auto nchain = numeric_chain<double>(chain);
      double log_s = log_survival(nchain, static_cast<std::uint64_t>(s), engine);
      values.push_back(-log_s / (s * to_double(chain.hole_measure)));
      used = n;
    }
    if (values.size() < 4) return {values.back(), {used, false}};
    auto ex = extrapolate_limit(values, extrap_tol);
    return {ex.limit, {used, ex.converged}};
  };

  std::map<int, double> inner_cache;
  for (int s : s_range) {
    LZeroRow row;
    row.s = s;
    auto [value, info] = inner_at(s);
    row.inner_value = value;
    row.n_used = info.first;
    row.stabilized = info.second;
    inner_cache[s] = value;
    if (p >= 2) {
      // -log survival is monotone in time, so the aligned times k p - 1 and
      // (k+1) p - 1 bound the inner value after rescaling by s.
      int k = s / p;
      int s_lo = k * p - 1;
      int s_hi = (k + 1) * p - 1;
      if (s_lo >= 1) {
        double v_lo = inner_cache.count(s_lo) ? inner_cache[s_lo] : inner_at(s_lo).first;
        row.bound_lo = v_lo * static_cast<double>(s_lo) / static_cast<double>(s);
      }
      double v_hi = inner_cache.count(s_hi) ? inner_cache[s_hi] : inner_at(s_hi).first;
      row.bound_hi = v_hi * static_cast<double>(s_hi) / static_cast<double>(s);
    }
    result.rows.push_back(row);
  }
  if (result.rows.size() >= 4) {
    std::vector<double> vals;
    for (const auto& r : result.rows) vals.push_back(r.inner_value);
    result.outer = extrapolate_limit(vals, extrap_tol);
  } else {
    result.outer.limit = result.rows.back().inner_value;
    result.outer.lo = result.outer.hi = result.outer.limit;
  }
  return result;
}

UnionMeasureReport union_measure_check(const PointSpec& z, int p, int n, int k,
                                       const MeasureModel& mu, const SymbolicSystem& system,
                                       std::uint64_t cap) {
  auto pp = prime_period(z, p, system);
  if (pp.status != PrimePeriodResult::Status::Found || *pp.period != p)
    throw ConfigError("union_measure_check requires a point with prime period p");
  if (n < 1 || k < 0) throw ConfigError("invalid union_measure_check parameters");

  const int len = n + k * p;
  const auto pattern = z.prefix(n, system);
  Rat exact = 0;
  // Weighted enumeration over all admissible words of length n + k p.
  for (const auto& w : enumerate_join(system, len, cap)) {
    bool hit = false;
    for (int i = 0; i <= k && !hit; ++i) {
      bool match = true;
      for (int j = 0; j < n; ++j) {
        if (w.symbols[static_cast<std::size_t>(i * p + j)] != pattern[static_cast<std::size_t>(j)]) {
          match = false;
          break;
        }
      }
      hit = match;
    }
    if (hit) exact += mu.cylinder(w);
  }

  Word base = cylinder_around(z, n, system);
  Word extended = intersected_cylinder(z, n, p, 1, system);
  Rat mu_n = mu.cylinder(base);
  Rat th = mu.cylinder(extended) / mu_n;
  UnionMeasureReport rep;
  rep.exact = exact;
  rep.prediction = mu_n * (Rat(k + 1) - Rat(k) * th);
  rep.defect = rat_abs(rep.exact - rep.prediction);
  rep.aligned = (k * p <= n);
  return rep;
}

LocalizedEscapeCurve localized_escape_rate(const PointSpec& z, const MeasureModel& mu,
                                           const SymbolicSystem& system, const NRange& n_range,
                                           const EngineOptions& engine,
                                           const ChainBuildOptions& build, double extrap_tol) {
  LocalizedEscapeCurve curve;
  for (int n : n_range.list()) {
    HoleSpec hole = HoleSpec::normalized({cylinder_around(z, n, system)}, system);
    OpenChain chain = compile_hole(system, mu, hole, build);
    auto nchain = numeric_chain<double>(chain);
    auto esc = escape_rate(nchain, engine);
    LocalizedEscapeRow row;
    row.n = n;
    row.rho = esc.rho;
    row.mu_n = to_double(chain.hole_measure);
    row.ratio = esc.rho / row.mu_n;
    curve.per_n.push_back(row);
  }
  if (curve.per_n.size() >= 4) {
    std::vector<double> vals;
    for (const auto& r : curve.per_n) vals.push_back(r.ratio);
    curve.extrapolated = extrapolate_limit(vals, extrap_tol);
  } else {
    curve.extrapolated.limit = curve.per_n.back().ratio;
    curve.extrapolated.lo = curve.extrapolated.hi = curve.extrapolated.limit;
  }
  return curve;
}

CaseVerdict check_decay_case(const CaseInputs& in) {
  CaseVerdict v;
  if (in.mu_fit.kind == DecayFit::Kind::Polynomial) {
    v.mu_case = HypothesisReport::Case::Polynomial;
    if (!(in.eps > 0.0) || !(in.eps < std::min(1.0, in.alpha)))
      throw ConfigError("eps must lie in (0, min(1, alpha))");
    if (!(in.beta > 0.0) || !(in.beta < 1.0)) throw ConfigError("beta must lie in (0,1)");
    v.m_required = (1.0 - in.eps) / (in.beta * in.eps);
    bool gammas_ok = in.gamma_prime > 1.0 && in.gamma_second > in.gamma_prime;
    if (in.phi_fit.kind == DecayFit::Kind::Exponential) {
      v.vacuous = true;  // exponential mixing decay dominates any power
      v.pass = gammas_ok;
      v.reason = gammas_ok ? "phi decays exponentially; power condition vacuous"
                           : "mu(U_n) power bracket invalid";
    } else if (in.phi_fit.kind == DecayFit::Kind::Polynomial) {
      v.pass = gammas_ok && in.phi_fit.power >= v.m_required;
      v.reason = v.pass ? "m >= (1-eps)/(beta eps)"
                        : "fitted phi power " + double_repr(in.phi_fit.power) +
                              " below required " + double_repr(v.m_required);
    } else {
      v.pass = false;
      v.reason = "phi decay undetermined";
    }
    return v;
  }
  if (in.mu_fit.kind == DecayFit::Kind::Exponential) {
    v.mu_case = HypothesisReport::Case::Exponential;
    v.pass = in.xi1 > 0.0 && in.xi1 < in.xi2 && in.xi2 < 1.0;
    v.reason = v.pass ? "exponential mu(U_n) bracket valid; no phi power condition"
                      : "exponential bracket invalid";
    return v;
  }
  v.pass = false;
  v.reason = "mu(U_n) decay undetermined";
  return v;
}

HypothesisReport check_hypotheses(const PointSpec& z, const MeasureModel& mu,
                                  const SymbolicSystem& system, double alpha,
                                  const NRange& n_range, const HypothesisParams& params) {
  HypothesisReport rep;
  const int n_max = n_range.hi;

  auto pp = prime_period(z, 64, system);
  const bool periodic = pp.status == PrimePeriodResult::Status::Found;
  const int p = periodic ? *pp.period : 0;

  // mu(U_n) decay data
  std::vector<double> mu_values;
  for (int n : n_range.list())
    mu_values.push_back(to_double(mu.cylinder(cylinder_around(z, n, system))));

  // (N1): fit the power of j against the measure of the outer j-approximation
  // of the deepest cylinder.
  {
    HoleSpec hole = HoleSpec::normalized({cylinder_around(z, n_max, system)}, system);
    int j_hi = std::max(2, static_cast<int>(std::floor(params.K * n_max)));
    std::vector<double> xs, ys;
    for (int j = 1; j <= j_hi; ++j) {
      auto words = outer_j_approximation(hole, j, params.side, system);
      Rat mass = 0;
      for (const auto& w : words) mass += mu.cylinder(w);
      xs.push_back(std::log(static_cast<double>(j)));
      ys.push_back(std::log(to_double(mass)));
    }
    double n_pts = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    double slope = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
    rep.n1_gamma_prime = -slope;
    rep.n1_K = params.K;
    rep.n1_pass = rep.n1_gamma_prime > 1.0;
  }

  // (N2): exact defect over multiple-of-p index vectors bounded by a_n * n.
  if (periodic) {
    rep.n2_applicable = true;
    std::vector<double> mu_fit_probe = mu_values;
    DecayFit pre_fit = mu_fit_probe.size() >= 8 ? classify_decay(mu_fit_probe)
                                                : DecayFit{DecayFit::Kind::Exponential, 0, 0, 0, 0};
    double a_n = pre_fit.kind == DecayFit::Kind::Polynomial
                     ? std::pow(static_cast<double>(n_max), -(1.0 - params.xi))
                     : params.a_const;
    rep.n2_a_n = a_n;
    int i_cap = static_cast<int>(std::floor(a_n * n_max));
    std::vector<int> offsets;
    for (int i = p; i <= i_cap; i += p) offsets.push_back(i);
    if (offsets.size() > 20) throw CapExceededError("N2 index family too large to enumerate");
    const auto pattern = z.prefix(n_max, system);
    double max_defect = 0.0;
    int count = 0;
    for (std::uint64_t mask = 1; mask < (1ull << offsets.size()); ++mask) {
      std::map<int, int> constraints;
      int i_k = 0;
      for (int j = 0; j < n_max; ++j) constraints[j] = pattern[static_cast<std::size_t>(j)];
      bool consistent = true;
      for (std::size_t b = 0; b < offsets.size(); ++b) {
        if (!(mask & (1ull << b))) continue;
        int off = offsets[b];
        i_k = std::max(i_k, off);
        for (int j = 0; j < n_max; ++j) {
          auto [it, inserted] = constraints.emplace(off + j, pattern[static_cast<std::size_t>(j)]);
          if (!inserted && it->second != pattern[static_cast<std::size_t>(j)]) consistent = false;
        }
      }
      Rat lhs = consistent ? mu.constrained_measure(constraints) : Rat(0);
      Rat rhs = mu.cylinder(Word(z.prefix(n_max + i_k, system)));
      double defect = rhs == 0 ? (lhs == 0 ? 0.0 : 1.0)
                               : std::abs(to_double((lhs - rhs) / rhs));
      max_defect = std::max(max_defect, defect);
      ++count;
    }
    rep.n2_max_defect = max_defect;
    rep.n2_vectors = count;
    rep.n2_pass = max_defect <= params.n2_tol;
  } else {
    rep.n2_applicable = false;
    rep.n2_pass = true;
  }

  // Decay case
  CaseInputs inputs;
  inputs.alpha = alpha;
  inputs.eps = params.eps;
  inputs.beta = params.beta;
  inputs.mu_fit = mu_values.size() >= 8 ? classify_decay(mu_values)
                                        : DecayFit{DecayFit::Kind::Exponential, 0, 0, 0, 0};
  PhiProfile phi = build_phi_profile(mu, params.phi_k_max, params.side);
  inputs.phi_fit = phi.fit;
  if (inputs.mu_fit.kind == DecayFit::Kind::Exponential) {
    double lo = 1.0, hi = 0.0;
    auto ns = n_range.list();
    for (std::size_t i = 0; i < ns.size(); ++i) {
      double root = std::pow(mu_values[i], 1.0 / static_cast<double>(ns[i]));
      lo = std::min(lo, root);
      hi = std::max(hi, root);
    }
    inputs.xi1 = lo - params.xi_margin;
    inputs.xi2 = hi + params.xi_margin;
  } else if (inputs.mu_fit.kind == DecayFit::Kind::Polynomial) {
    inputs.gamma_prime = inputs.mu_fit.power * 0.95;
    inputs.gamma_second = inputs.mu_fit.power * 1.05;
  }
  auto verdict = check_decay_case(inputs);
  rep.mu_case = verdict.mu_case;
  rep.b1_gamma_prime = inputs.gamma_prime;
  rep.b1_gamma_second = inputs.gamma_second;
  rep.b1_m_fitted = inputs.phi_fit.kind == DecayFit::Kind::Polynomial ? inputs.phi_fit.power : 0.0;
  rep.b1_m_required = verdict.m_required;
  rep.b1_vacuous = verdict.vacuous;
  rep.b2_xi1 = inputs.xi1;
  rep.b2_xi2 = inputs.xi2;
  bool case_pass = verdict.pass;
  if (verdict.mu_case == HypothesisReport::Case::Polynomial)
    rep.b1_pass = case_pass;
  else if (verdict.mu_case == HypothesisReport::Case::Exponential)
    rep.b2_pass = case_pass;
  rep.notes.push_back(verdict.reason);

  // theta < 1/2
  if (periodic) {
    rep.theta_applicable = true;
    auto th = theta(z, p, mu, system, n_range);
    rep.theta_value = to_double(th.limit);
    rep.theta_below_half = th.below_half;
    if (!th.below_half)
      rep.notes.push_back("theta = " + rat_string(th.limit) + " is not below 1/2");
  } else {
    rep.theta_applicable = false;
    rep.theta_below_half = true;  // no condition at non-periodic points
  }

  rep.overall_pass = rep.n1_pass && rep.n2_pass && case_pass && rep.theta_below_half;
  return rep;
}

}  // namespace reclab
