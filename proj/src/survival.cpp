#include "reclab/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reclab {

template <class S>
std::vector<S> tail_vector(const NumericChain<S>& chain) {
  std::vector<S> v(static_cast<std::size_t>(chain.num_states), S(1));
  std::vector<S> scratch;
  for (int d = chain.max_word_len - 1; d >= 1; --d) {
    chain_apply(chain, d, v, scratch);
    v.swap(scratch);
  }
  return v;
}

template std::vector<double> tail_vector<double>(const NumericChain<double>&);
template std::vector<Rat> tail_vector<Rat>(const NumericChain<Rat>&);

namespace {

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b) {
  S acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

template <class S>
S survival_at(const NumericChain<S>& chain, std::uint64_t t) {
  if (t == 0) return S(1);
  std::vector<S> u = tail_vector(chain);
  std::vector<S> scratch;
  for (std::uint64_t step = 1; step < t; ++step) {
    chain_apply(chain, 0, u, scratch);
    u.swap(scratch);
  }
  return dot(chain.init, u);
}

template double survival_at<double>(const NumericChain<double>&, std::uint64_t);
template Rat survival_at<Rat>(const NumericChain<Rat>&, std::uint64_t);

template <class S>
std::vector<S> survival_curve(const NumericChain<S>& chain, std::uint64_t t_max) {
  std::vector<S> out;
  out.reserve(t_max + 1);
  out.push_back(S(1));
  if (t_max == 0) return out;
  std::vector<S> u = tail_vector(chain);
  std::vector<S> scratch;
  out.push_back(dot(chain.init, u));
  for (std::uint64_t t = 2; t <= t_max; ++t) {
    chain_apply(chain, 0, u, scratch);
    u.swap(scratch);
    out.push_back(dot(chain.init, u));
  }
  return out;
}

template std::vector<double> survival_curve<double>(const NumericChain<double>&, std::uint64_t);
template std::vector<Rat> survival_curve<Rat>(const NumericChain<Rat>&, std::uint64_t);

LogSurvivalSweep::LogSurvivalSweep(const NumericChain<double>& chain) : chain_(chain) {}

double LogSurvivalSweep::at(std::uint64_t t) {
  if (t == 0) return 0.0;
  if (t_cur_ == 0) {
    u_ = tail_vector(chain_);
    t_cur_ = 1;
  }
  if (t < t_cur_) throw std::logic_error("LogSurvivalSweep times must not decrease");
  while (t_cur_ < t) {
    chain_apply(chain_, 0, u_, scratch_);
    u_.swap(scratch_);
    ++t_cur_;
    double m = 0.0;
    for (double v : u_) m = std::max(m, v);
    if (m == 0.0) {
      acc_ = -std::numeric_limits<double>::infinity();
      return acc_;
    }
    if (m < 1e-120) {
      for (double& v : u_) v /= m;
      acc_ += std::log(m);
    }
  }
  double mass = dot(chain_.init, u_);
  if (mass <= 0.0 || acc_ == -std::numeric_limits<double>::infinity())
    return -std::numeric_limits<double>::infinity();
  return std::log(mass) + acc_;
}

namespace {

// Scaled dense power: M^e together with a log scale factor.
struct ScaledMatrix {
  int n = 0;
  std::vector<double> m;  // row-major
  double log_scale = 0.0;

  void rescale() {
    double mx = 0.0;
    for (double v : m) mx = std::max(mx, v);
    if (mx > 0.0 && (mx > 1e120 || mx < 1e-120)) {
      for (double& v : m) v /= mx;
      log_scale += std::log(mx);
    }
  }
};

ScaledMatrix dense_step_matrix(const NumericChain<double>& chain) {
  ScaledMatrix out;
  out.n = chain.num_states;
  out.m.assign(static_cast<std::size_t>(out.n) * out.n, 0.0);
  for (int s = 0; s < chain.num_states; ++s)
    for (int a = 0; a < chain.alphabet; ++a) {
      std::size_t slot = static_cast<std::size_t>(s) * chain.alphabet + a;
      if (chain.next[slot] < 0 || chain.det_len[slot] > 0) continue;
      out.m[static_cast<std::size_t>(s) * out.n + chain.next[slot]] += chain.prob[slot];
    }
  return out;
}

ScaledMatrix multiply(const ScaledMatrix& x, const ScaledMatrix& y) {
  ScaledMatrix z;
  z.n = x.n;
  z.m.assign(static_cast<std::size_t>(z.n) * z.n, 0.0);
  z.log_scale = x.log_scale + y.log_scale;
  const int n = z.n;
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double v = x.m[static_cast<std::size_t>(i) * n + l];
      if (v == 0.0) continue;
      const double* yr = y.m.data() + static_cast<std::size_t>(l) * n;
      double* zr = z.m.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) zr[j] += v * yr[j];
    }
  z.rescale();
  return z;
}

ScaledMatrix power(ScaledMatrix base, std::uint64_t e) {
  ScaledMatrix result;
  result.n = base.n;
  result.m.assign(static_cast<std::size_t>(result.n) * result.n, 0.0);
  for (int i = 0; i < result.n; ++i) result.m[static_cast<std::size_t>(i) * result.n + i] = 1.0;
  while (e) {
    if (e & 1) result = multiply(result, base);
    e >>= 1;
    if (e) base = multiply(base, base);
  }
  return result;
}

}  // namespace

double log_survival(const NumericChain<double>& chain, std::uint64_t t,
                    const EngineOptions& options) {
  if (t == 0) return 0.0;
  if (t - 1 <= options.iterate_horizon) {
    LogSurvivalSweep sweep(chain);
    return sweep.at(t);
  }
  if (chain.num_states > options.dense_power_cap)
    throw CapExceededError("survival horizon exceeded: " + std::to_string(t) +
                           " steps on a chain with " + std::to_string(chain.num_states) +
                           " states");
  ScaledMatrix pow_matrix = power(dense_step_matrix(chain), t - 1);
  std::vector<double> tail = tail_vector(chain);
  const int n = chain.num_states;
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += pow_matrix.m[static_cast<std::size_t>(i) * n + j] * tail[static_cast<std::size_t>(j)];
    v[static_cast<std::size_t>(i)] = acc;
  }
  double mass = dot(chain.init, v);
  if (mass <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(mass) + pow_matrix.log_scale;
}

namespace {

// Two Aitken passes over a tail of values whose errors shrink geometrically
// (the case for doubling checkpoints of 1/k-type corrections).
double aitken_tail(std::vector<double> v) {
  for (int pass = 0; pass < 2 && v.size() >= 3; ++pass) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 2 < v.size(); ++i) {
      double d1 = v[i + 1] - v[i];
      double d2 = v[i + 2] - v[i + 1];
      double denom = d2 - d1;
      next.push_back(std::abs(denom) < 1e-300 ? v[i + 2] : v[i + 2] - d2 * d2 / denom);
    }
    v = std::move(next);
  }
  return v.back();
}

}  // namespace

EscapeResult escape_rate(const NumericChain<double>& chain, const EngineOptions& options) {
  EscapeResult res;
  std::vector<double> u(static_cast<std::size_t>(chain.num_states), 1.0);
  std::vector<double> scratch;
  double lambda_prev = -1.0;
  double lambda = 0.0;
  int stable = 0;
  std::uint64_t iter = 0;
  bool settled = false;
  std::vector<double> checkpoints;  // Rayleigh values at iterations 64 * 2^j
  std::uint64_t next_checkpoint = 64;
  while (iter < options.escape_iteration_cap) {
    chain_apply(chain, 0, u, scratch);
    ++iter;
    double num = dot(scratch, u);
    double den = dot(u, u);
    if (den == 0.0 || num <= 0.0)
      throw NonConvergenceError("power iteration collapsed: chain is degenerate or reducible");
    lambda = num / den;
    double mx = 0.0;
    for (double v : scratch) mx = std::max(mx, v);
    for (double& v : scratch) v /= mx;
    u.swap(scratch);
    if (iter == next_checkpoint) {
      checkpoints.push_back(lambda);
      next_checkpoint *= 2;
    }
    if (lambda_prev > 0.0 && std::abs(lambda - lambda_prev) <= options.escape_tol * lambda) {
      if (++stable >= 10) {
        settled = true;
        break;
      }
    } else {
      stable = 0;
    }
    lambda_prev = lambda;
  }
  // A leading eigenvalue with a nontrivial Jordan block makes the Rayleigh
  // sequence converge like 1/k: its increments shrink below tolerance long
  // before the value does. The doubling checkpoints then carry geometric
  // errors, so acceleration recovers the limit; it overrides the raw value
  // whenever the two disagree materially.
  bool accel_ok = false;
  double accel = 0.0;
  if (checkpoints.size() >= 5) {
    accel = aitken_tail(checkpoints);
    double prev = aitken_tail(std::vector<double>(checkpoints.begin(), checkpoints.end() - 1));
    accel_ok = accel > 0.0 && std::abs(accel - prev) <= 1e3 * options.escape_tol * accel;
  }
  if (settled) {
    res.lambda = lambda;
    if (accel_ok && std::abs(accel - lambda) > 10.0 * options.escape_tol * lambda)
      res.lambda = accel;
  } else if (accel_ok) {
    res.lambda = accel;
  } else {
    throw NonConvergenceError("power iteration did not converge within the iteration cap");
  }
  res.rho = -std::log(res.lambda);
  res.iterations = iter;

  // Cross-check against the log-survival slope at doubling horizons; when the
  // direct gap stalls (the Jordan case decays only like 1/T), accelerate the
  // slope sequence the same way.
  LogSurvivalSweep sweep(chain);
  std::uint64_t t = 64;
  std::vector<double> slopes;
  double prev_ls = sweep.at(t);
  bool checked = false;
  while (t <= options.slope_check_t_cap) {
    double ls2 = sweep.at(2 * t);
    double slope_rho = -(ls2 - prev_ls) / static_cast<double>(t);
    slopes.push_back(slope_rho);
    res.slope_estimate = slope_rho;
    res.slope_t = t;
    if (std::abs(slope_rho - res.rho) <= 10.0 * options.escape_tol) {
      checked = true;
      break;
    }
    if (slopes.size() >= 6) {
      double accel = aitken_tail(slopes);
      if (std::abs(accel - res.rho) <= 1e3 * options.escape_tol * std::max(1.0, std::abs(res.rho))) {
        res.slope_estimate = accel;
        checked = true;
        break;
      }
    }
    prev_ls = ls2;
    t *= 2;
  }
  if (!checked)
    throw NonConvergenceError("escape rate: spectral and slope estimates disagree");
  return res;
}

double McCurve::survival(int t) const {
  std::uint64_t hits = 0;
  for (int j = 1; j <= t && j <= t_max; ++j) hits += tau_hist[static_cast<std::size_t>(j)];
  return static_cast<double>(trials - hits) / static_cast<double>(trials);
}

std::vector<double> McCurve::curve() const {
  std::vector<double> out(static_cast<std::size_t>(t_max) + 1);
  std::uint64_t hits = 0;
  out[0] = 1.0;
  for (int t = 1; t <= t_max; ++t) {
    hits += tau_hist[static_cast<std::size_t>(t)];
    out[static_cast<std::size_t>(t)] = static_cast<double>(trials - hits) / static_cast<double>(trials);
  }
  return out;
}

McCurve monte_carlo_survival(const SymbolicSystem& system, const MeasureModel& mu,
                             const HoleSpec& hole, int t_max, std::uint64_t trials,
                             std::uint64_t master_seed) {
  if (trials < 1) throw ConfigError("monte carlo needs at least one trial");
  McCurve curve;
  curve.trials = trials;
  curve.t_max = t_max;
  curve.tau_hist = mc_first_hit_histogram(system, mu, hole, t_max, trials, master_seed);
  return curve;
}

ProductRelationReport product_relation_residual(const OpenChain& chain, const MeasureModel& mu,
                                                int s, int k, int delta,
                                                std::optional<std::uint64_t> t_opt, Side phi_side) {
  ProductRelationReport rep;
  rep.s = s;
  rep.k = k;
  rep.delta = delta;
  if (delta < 1 || 2 * delta >= s) throw ConfigError("require 0 < Delta < s/2");
  if (s % delta != 0) throw ConfigError("require s = q Delta with integer q");
  if (k < 3) throw ConfigError("require k >= 3");
  if (delta <= chain.max_word_len)
    throw ConfigError("require Delta > hole depth so the mixing gap is positive");
  rep.q = s / delta;
  rep.eta = static_cast<double>(rep.q) / static_cast<double>(rep.q + 1);
  rep.t = t_opt.value_or(static_cast<std::uint64_t>(k) * s);
  if (rep.t <= static_cast<std::uint64_t>(delta)) throw ConfigError("require t > Delta");

  rep.delta_bound =
      2 * (Rat(delta) * chain.hole_measure + phi_coefficient_exact(mu, delta - chain.max_word_len, phi_side));

  auto nchain = numeric_chain<Rat>(chain);
  std::uint64_t t_hi = std::max(rep.t + static_cast<std::uint64_t>(s),
                                static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(s));
  auto curve = survival_curve(nchain, t_hi);
  auto sv = [&](std::uint64_t tt) { return curve[static_cast<std::size_t>(tt)]; };

  rep.lemma_lhs = rat_abs(sv(rep.t + static_cast<std::uint64_t>(s)) -
                          sv(rep.t) * sv(static_cast<std::uint64_t>(s)));
  rep.lemma_rhs = rep.delta_bound * sv(rep.t - static_cast<std::uint64_t>(delta));
  rep.lemma_pass = rep.lemma_lhs <= rep.lemma_rhs;

  double s_ks = to_double(sv(static_cast<std::uint64_t>(k) * s));
  double root = (s_ks > 0.0) ? std::pow(s_ks, 1.0 / static_cast<double>(k - 2)) : 0.0;
  rep.kfold_lhs = std::abs(root - to_double(sv(static_cast<std::uint64_t>(s))));
  rep.kfold_rhs = std::pow(to_double(rep.delta_bound), rep.eta);
  rep.kfold_pass = rep.kfold_lhs <= rep.kfold_rhs;
  return rep;
}

}  // namespace reclab
