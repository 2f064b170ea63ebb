#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reclab/extrapolate.hpp"
#include "reclab/measure.hpp"
#include "reclab/open_chain.hpp"
#include "reclab/survival.hpp"

namespace reclab {

struct NRange {
  int lo = 2, hi = 12;
  std::vector<int> list() const {
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
};

struct ThetaEstimate {
  int period = 0;
  std::vector<std::pair<int, Rat>> per_n;  // (n, mu(U_n cap T^-p U_n) / mu(U_n))
  Rat limit;
  bool converged = false;
  bool below_half = false;
};

/// theta at a p-periodic point: the ratio is exact and constant in n for
/// Bernoulli and Markov measures.
ThetaEstimate theta(const PointSpec& z, int p, const MeasureModel& mu,
                    const SymbolicSystem& system, const NRange& n_range,
                    double tol = 1e-9);

struct Alpha {
  bool infinite = false;
  double value = 1.0;
  static Alpha finite(double v) { return {false, v}; }
  static Alpha infinity() { return {true, 0.0}; }
  std::string str() const;
};

struct LPoint {
  int n = 0;
  std::uint64_t t = 0;
  double mu_n = 0.0;
  double value = 0.0;
};

struct LCurve {
  Alpha alpha;
  double s = 1.0;
  std::vector<LPoint> per_n;
  Extrapolation extrapolated;
  std::vector<std::string> warnings;
  bool partial = false;  // horizon or cap stopped the sweep early
};

/// Normalized log-survival statistic at cylinder neighbourhoods of z,
/// exponent alpha in (0, inf).
LCurve l_alpha_s(const PointSpec& z, double alpha, double s, const MeasureModel& mu,
                 const SymbolicSystem& system, const NRange& n_range,
                 const EngineOptions& engine = {}, const ChainBuildOptions& build = {},
                 double extrap_tol = 1e-3);

struct LZeroRow {
  int s = 0;
  double inner_value = 0.0;  // stabilized over n
  int n_used = 0;
  bool stabilized = false;
  // Sandwich bounds from the aligned times (k p - 1 and (k+1) p - 1).
  std::optional<double> bound_lo, bound_hi;
};

struct LZeroResult {
  std::vector<LZeroRow> rows;
  Extrapolation outer;  // trend in s
};

/// alpha = 0 regime: inner limit over n at fixed s, then the trend in s.
LZeroResult l_zero(const PointSpec& z, const std::vector<int>& s_range, const MeasureModel& mu,
                   const SymbolicSystem& system, const NRange& n_range,
                   const EngineOptions& engine = {}, const ChainBuildOptions& build = {},
                   double extrap_tol = 1e-3);

struct UnionMeasureReport {
  Rat exact;       // mu( union_{i<=k} T^-(ip) U_n )
  Rat prediction;  // mu(U_n) (k+1 - k theta)
  Rat defect;      // |exact - prediction|
  bool aligned = false;  // k p <= n: shifted copies chain-overlap
};

UnionMeasureReport union_measure_check(const PointSpec& z, int p, int n, int k,
                                       const MeasureModel& mu, const SymbolicSystem& system,
                                       std::uint64_t enumeration_cap = kDefaultEnumerationCap);

struct LocalizedEscapeRow {
  int n = 0;
  double rho = 0.0;
  double mu_n = 0.0;
  double ratio = 0.0;  // rho(U_n) / mu(U_n)
};

struct LocalizedEscapeCurve {
  std::vector<LocalizedEscapeRow> per_n;
  Extrapolation extrapolated;
};

LocalizedEscapeCurve localized_escape_rate(const PointSpec& z, const MeasureModel& mu,
                                           const SymbolicSystem& system, const NRange& n_range,
                                           const EngineOptions& engine = {},
                                           const ChainBuildOptions& build = {},
                                           double extrap_tol = 1e-3);

struct HypothesisParams {
  double eps = 0.5;
  double beta = 0.9;
  double K = 0.5;
  // Schedule for the index bound in the product-structure condition:
  // polynomial mu-decay uses a_n = n^-(1-xi); exponential uses a_n = a.
  double xi = 0.5;
  double a_const = 0.5;
  double xi_margin = 0.01;   // widening of the exponential-decay bracket
  double n2_tol = 1e-9;
  int phi_k_max = 32;
  Side side = Side::Left;
};

struct HypothesisReport {
  // (N1) polynomial bound on outer approximations
  double n1_gamma_prime = 0.0;
  double n1_K = 0.0;
  bool n1_pass = false;
  // (N2) product structure at multiple-of-p index vectors (periodic points)
  bool n2_applicable = false;
  double n2_max_defect = 0.0;
  double n2_a_n = 0.0;
  int n2_vectors = 0;
  bool n2_pass = false;
  // mu(U_n) decay case
  enum class Case { Polynomial, Exponential, Undetermined };
  Case mu_case = Case::Undetermined;
  // polynomial branch
  double b1_gamma_prime = 0.0, b1_gamma_second = 0.0;
  double b1_m_fitted = 0.0, b1_m_required = 0.0;
  bool b1_vacuous = false;  // phi decays exponentially
  bool b1_pass = false;
  // exponential branch
  double b2_xi1 = 0.0, b2_xi2 = 0.0;
  bool b2_pass = false;
  // theta hypothesis
  bool theta_applicable = false;
  double theta_value = 0.0;
  bool theta_below_half = false;
  bool overall_pass = false;
  std::vector<std::string> notes;
};

/// Arithmetic of the decay-case conditions alone, reusable with synthetic
/// profiles: given the phi fit and the mu(U_n) decay fit, decides the
/// polynomial/exponential branch.
struct CaseInputs {
  DecayFit phi_fit;
  DecayFit mu_fit;
  double alpha = 1.0;
  double eps = 0.5;
  double beta = 0.9;
  double gamma_prime = 0.0, gamma_second = 0.0;  // polynomial mu bracket
  double xi1 = 0.0, xi2 = 0.0;                   // exponential mu bracket
};

struct CaseVerdict {
  HypothesisReport::Case mu_case = HypothesisReport::Case::Undetermined;
  double m_required = 0.0;
  bool vacuous = false;
  bool pass = false;
  std::string reason;
};

CaseVerdict check_decay_case(const CaseInputs& in);

HypothesisReport check_hypotheses(const PointSpec& z, const MeasureModel& mu,
                                  const SymbolicSystem& system, double alpha,
                                  const NRange& n_range, const HypothesisParams& params);

}  // namespace reclab
