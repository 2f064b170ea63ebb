#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "reclab/extrapolate.hpp"
#include "reclab/measure.hpp"
#include "reclab/rational.hpp"
#include "reclab/survival.hpp"

namespace reclab {

/// The circle doubling map x -> 2x mod 1, coded by the partition
/// {[0,1/2), [1/2,1)}. Generation-n dyadic cells are exactly the n-cylinders
/// of the coding. All geometry is exact rational arithmetic.
struct Ball {
  Rat center;  // in [0,1)
  Rat radius;  // in (0,1/2); the realized set is the open arc (center-r, center+r)

  Ball(Rat c, Rat r);

  /// Dyadic rational whose binary digits are the first `bits` of the
  /// Thue-Morse sequence; a non-periodic center for desk-scale experiments
  /// (exact for cell depths well below `bits`).
  static Rat thue_morse_center(int bits = 48);
};

Rat circle_distance(const Rat& x, const Rat& y);

/// First n binary digits of x under the doubling-map coding.
std::vector<int> doubling_digits(Rat x, int n);

/// Physical cell-index ranges [begin, end) at generation n; at most two
/// pieces (the arc may cross 0).
struct CellRanges {
  int n = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pieces;
  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (auto [b, e] : pieces) c += e - b;
    return c;
  }
};

CellRanges inner_cells(const Ball& ball, int n);
CellRanges outer_cells(const Ball& ball, int n);

/// Canonical prefix-free dyadic cover of the ranges (maximal aligned blocks,
/// words of length <= n).
std::vector<Word> canonical_words(const CellRanges& ranges);

struct CylinderUnionPair {
  int n = 0;
  CellRanges inner, outer;
  std::vector<Word> inner_words, outer_words;
  Rat inner_mass, outer_mass;
};

/// q0 = coding-measure mass of digit 0; Lebesgue corresponds to q0 = 1/2.
CylinderUnionPair ball_to_cylinders(const Ball& ball, int n, const Rat& q0,
                                    std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// Exact distribution function of the Bernoulli(q0, 1-q0) coding measure at a
/// rational point: the measure of [0, x).
Rat coding_cdf(const Rat& q0, const Rat& x);

/// Exact coding measure of the open arc.
Rat ball_measure(const Rat& q0, const Ball& ball);

struct ThetaBallEstimate {
  int period = 0;
  std::vector<std::pair<Rat, Rat>> per_r;  // (r, ratio)
  Extrapolation extrapolated;
  bool below_half = false;
};

/// theta for metric balls at a point of period p under doubling: the
/// preimage of the arc is 2^p arcs of radius r/2^p; the intersection is
/// evaluated by exact arc arithmetic.
ThetaBallEstimate theta_ball(const Rat& center, int p, const std::vector<Rat>& r_schedule,
                             const Rat& q0);

struct BallLRow {
  Rat r;
  int n = 0;
  Rat inner_mass, outer_mass, ball_mass;
  std::uint64_t t = 0;
  std::optional<double> l_low;  // absent when the inner union is empty
  double l_high = 0.0;
  std::optional<double> mc_estimate;
  // Statistical allowance on the L scale for the 3/sqrt(N) survival-scale
  // band; when the arc is dyadic-aligned the ball value sits exactly on the
  // bracket edge, so a raw comparison would reject on noise alone.
  double mc_tolerance = 0.0;
  bool mc_inside = false;
};

struct BallLReport {
  double alpha = 1.0, s = 1.0;
  int v = 2;
  std::vector<BallLRow> rows;
  Extrapolation low_extrapolated, high_extrapolated;
  std::vector<std::string> warnings;
};

struct BallLOptions {
  int v = 2;  // cell-diameter coupling: smallest n with 2^-n <= r^v
  std::uint64_t mc_trials = 0;  // 0 disables the direct-orbit Monte Carlo
  std::uint64_t master_seed = 1;
  EngineOptions engine{};
  ChainBuildOptions build{};
  double extrap_tol = 1e-3;
};

/// Survival statistic for metric balls, bracketed by the inner/outer cylinder
/// unions; the value for the ball itself is stochastically ordered between
/// the two union values at the exact ball-measure horizon.
BallLReport l_ball(const Rat& center, const std::vector<Rat>& r_schedule, double alpha, double s,
                   const Rat& q0, const BallLOptions& options = {});

/// Empirical survival of the ball over seeded digit streams; returns the
/// fraction of trials with no hit up to t.
double mc_ball_survival(const Rat& center, const Rat& radius, const Rat& q0, std::uint64_t t,
                        std::uint64_t trials, std::uint64_t master_seed);

}  // namespace reclab
