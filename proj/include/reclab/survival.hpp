#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reclab/kernels.hpp"
#include "reclab/measure.hpp"
#include "reclab/open_chain.hpp"

namespace reclab {

struct EngineOptions {
  // Beyond this many steps, log-survival switches to scaled matrix powers.
  std::uint64_t iterate_horizon = 1u << 20;
  // Dense matrix powers only below this state count.
  int dense_power_cap = 512;
  double escape_tol = 1e-12;
  std::uint64_t escape_iteration_cap = 1u << 20;
  std::uint64_t slope_check_t_cap = 1u << 20;
};

/// Product over the trailing window: the vector v with
/// survival(t) = init . M_0^(t-1) . v, folding the per-phase absorbing steps
/// for mixed-length holes (for a uniform-depth hole this is M^(depth-1) 1).
template <class S>
std::vector<S> tail_vector(const NumericChain<S>& chain);

/// mu(tau_U > t), exact when S = Rat.
template <class S>
S survival_at(const NumericChain<S>& chain, std::uint64_t t);

/// Survival for every t in 0..t_max, one sweep.
template <class S>
std::vector<S> survival_curve(const NumericChain<S>& chain, std::uint64_t t_max);

/// log mu(tau_U > t), stable for t far beyond floating-point range of the
/// survival probability itself. Uses the iterated kernel up to
/// options.iterate_horizon, scaled dense matrix powers beyond.
double log_survival(const NumericChain<double>& chain, std::uint64_t t,
                    const EngineOptions& options = {});

/// Incremental log-survival evaluation at a non-decreasing sequence of times.
class LogSurvivalSweep {
 public:
  explicit LogSurvivalSweep(const NumericChain<double>& chain);
  double at(std::uint64_t t);  // t must not decrease across calls

 private:
  const NumericChain<double>& chain_;
  std::vector<double> u_, scratch_;
  double acc_ = 0.0;
  std::uint64_t t_cur_ = 0;
};

struct EscapeResult {
  double lambda = 0.0;  // spectral radius of the absorbing step
  double rho = 0.0;     // -log lambda
  std::uint64_t iterations = 0;
  double slope_estimate = 0.0;  // from log-survival increments
  std::uint64_t slope_t = 0;
};

/// Spectral radius by power iteration on the survival vector with a
/// Rayleigh-quotient convergence test, cross-checked against the log-survival
/// slope. Throws NonConvergenceError when either part fails to settle.
EscapeResult escape_rate(const NumericChain<double>& chain, const EngineOptions& options = {});

struct McCurve {
  std::uint64_t trials = 0;
  int t_max = 0;
  std::vector<std::uint64_t> tau_hist;  // index 1..t_max; censored trials in no bucket

  double survival(int t) const;  // empirical mu(tau > t)
  std::vector<double> curve() const;
};

McCurve monte_carlo_survival(const SymbolicSystem& system, const MeasureModel& mu,
                             const HoleSpec& hole, int t_max, std::uint64_t trials,
                             std::uint64_t master_seed);

struct ProductRelationReport {
  int s = 0, k = 0, delta = 0, q = 0;
  std::uint64_t t = 0;
  Rat delta_bound;      // 2 (Delta mu(U) + phi(Delta - n))
  double eta = 0.0;     // q / (q+1)
  Rat lemma_lhs;        // |S(t+s) - S(t) S(s)|
  Rat lemma_rhs;        // delta_bound * S(t - Delta)
  bool lemma_pass = false;
  double kfold_lhs = 0.0;  // |S(ks)^(1/(k-2)) - S(s)|
  double kfold_rhs = 0.0;  // delta_bound^eta
  bool kfold_pass = false;
};

/// Exact evaluation of the factorization diagnostics at (s, k, Delta, t);
/// t defaults to k*s.
ProductRelationReport product_relation_residual(const OpenChain& chain, const MeasureModel& mu,
                                                int s, int k, int delta,
                                                std::optional<std::uint64_t> t = std::nullopt,
                                                Side phi_side = Side::Left);

}  // namespace reclab
