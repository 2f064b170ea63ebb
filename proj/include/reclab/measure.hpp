#pragma once

#include <map>
#include <vector>

#include "reclab/rational.hpp"
#include "reclab/symbolic.hpp"

namespace reclab {

/// Shift-invariant measure with exact cylinder evaluation: an i.i.d. Bernoulli
/// measure or a stationary Markov measure. Parameters are exact rationals.
class MeasureModel {
 public:
  enum class Kind { Bernoulli, Markov };

  static MeasureModel bernoulli(std::vector<Rat> probs);
  /// pi may be empty; the stationary vector is then solved for exactly.
  static MeasureModel markov(const SymbolicSystem& system, std::vector<std::vector<Rat>> P,
                             std::vector<Rat> pi = {});
  /// Skips the stationarity validation; for diagnostics such as the
  /// stationarity_check failure path.
  static MeasureModel markov_unchecked(std::vector<std::vector<Rat>> P, std::vector<Rat> pi);

  Kind kind() const { return kind_; }
  int alphabet_size() const { return alphabet_; }

  const Rat& initial(int symbol) const { return pi_[static_cast<std::size_t>(symbol)]; }
  const Rat& transition(int from, int to) const {
    return P_[static_cast<std::size_t>(from) * alphabet_ + to];
  }

  Rat cylinder(const Word& word) const;
  Rat hole_measure(const HoleSpec& hole) const;  // additive over the prefix-free set

  /// mu{x : x_pos = sym for all (pos, sym) in constraints}, exact.
  Rat constrained_measure(const std::map<int, int>& constraints) const;

  /// k-step transition matrix, exact.
  std::vector<Rat> transition_power(int k) const;
  /// Time-reversed chain P*(b,a) = pi_a P(a,b) / pi_b.
  std::vector<Rat> reversed_transition() const;

 private:
  MeasureModel() = default;
  Kind kind_ = Kind::Bernoulli;
  int alphabet_ = 0;
  std::vector<Rat> pi_;  // Bernoulli probabilities double as the initial law
  std::vector<Rat> P_;   // row-major; for Bernoulli P(a,b) = pi_b
};

struct StationarityReport {
  bool pass = false;
  Rat max_defect;
};

/// Verifies sum_a mu([a w]) = mu([w]) over all admissible words of length n.
StationarityReport stationarity_check(const MeasureModel& mu, const SymbolicSystem& system, int n,
                                      std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// Mixing coefficient at block distance k (the gap, in chain steps, between
/// the last constrained coordinate of A and the first of B). Bernoulli
/// measures give 0; Markov measures give the worst-row total-variation
/// distance of the k-step law from the stationary one (time-reversed chain
/// for Side::Right).
Rat phi_coefficient_exact(const MeasureModel& mu, int k, Side side);

/// Same supremum by enumeration over conditioning words A of length n <=
/// depth_cap and target depths d <= depth_cap; the optimal union for B is the
/// positive-part sum per conditioning state.
Rat phi_coefficient_bruteforce(const MeasureModel& mu, const SymbolicSystem& system, int k,
                               Side side, int depth_cap);

struct DecayFit {
  enum class Kind { Exponential, Polynomial, Undetermined };
  Kind kind = Kind::Undetermined;
  double rate = 0.0;   // exponential: phi(k) ~ rate^k
  double power = 0.0;  // polynomial: phi(k) ~ k^-power
  double residual_exp = 0.0;
  double residual_poly = 0.0;
};

/// Least-squares fit of log phi(k) against k and against log k on the tail
/// half of the sample; identically-zero profiles classify as exponential with
/// rate 0.
DecayFit classify_decay(const std::vector<double>& values, double residual_threshold = 0.25);

struct PhiProfile {
  Side side = Side::Left;
  std::vector<double> values;    // phi(1..k_max)
  std::vector<double> envelope;  // running max from the right; non-increasing
  DecayFit fit;
};

PhiProfile build_phi_profile(const MeasureModel& mu, int k_max, Side side,
                             double residual_threshold = 0.25);

}  // namespace reclab
