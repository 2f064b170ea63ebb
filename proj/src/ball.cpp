#include "reclab/ball.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "reclab/open_chain.hpp"
#include "reclab/rng.hpp"

namespace reclab {

namespace {

BigInt floor_rat(const Rat& x) {
  BigInt q = numerator(x) / denominator(x);
  if (x < 0 && q * denominator(x) != numerator(x)) q -= 1;
  return q;
}

Rat frac(const Rat& x) { return x - Rat(floor_rat(x)); }

}  // namespace

Ball::Ball(Rat c, Rat r) : center(std::move(c)), radius(std::move(r)) {
  if (center < 0 || center >= 1) throw ConfigError("ball center must lie in [0,1)");
  if (radius <= 0 || radius >= Rat(1, 2)) throw ConfigError("ball radius must lie in (0,1/2)");
}

Rat Ball::thue_morse_center(int bits) {
  BigInt num = 0;
  for (int i = 0; i < bits; ++i) {
    num <<= 1;
    num += std::popcount(static_cast<std::uint64_t>(i)) & 1;
  }
  return Rat(num, BigInt(1) << bits);
}

Rat circle_distance(const Rat& x, const Rat& y) {
  Rat f = frac(x - y);
  return std::min(f, Rat(Rat(1) - f));
}

std::vector<int> doubling_digits(Rat x, int n) {
  if (x < 0 || x >= 1) throw ConfigError("doubling_digits needs x in [0,1)");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x *= 2;
    if (x >= 1) {
      out.push_back(1);
      x -= 1;
    } else {
      out.push_back(0);
    }
  }
  return out;
}

namespace {

// Unrolled cell interval [first, last] for the arc (A, B); empty when
// last < first. Mapping back to physical indices wraps modulo 2^n.
struct UnrolledRange {
  BigInt first, last;
  bool full = false;
};

CellRanges to_physical(const UnrolledRange& u, int n) {
  CellRanges out;
  out.n = n;
  const BigInt cells = BigInt(1) << n;
  if (u.full || u.last - u.first + 1 >= cells) {
    out.pieces.emplace_back(0, static_cast<std::uint64_t>(cells));
    return out;
  }
  if (u.last < u.first) return out;
  BigInt b = ((u.first % cells) + cells) % cells;
  BigInt len = u.last - u.first + 1;
  std::uint64_t bb = b.convert_to<std::uint64_t>();
  std::uint64_t ll = len.convert_to<std::uint64_t>();
  std::uint64_t total = (BigInt(1) << n).convert_to<std::uint64_t>();
  if (bb + ll <= total) {
    out.pieces.emplace_back(bb, bb + ll);
  } else {
    out.pieces.emplace_back(bb, total);
    out.pieces.emplace_back(0, bb + ll - total);
  }
  return out;
}

}  // namespace

CellRanges inner_cells(const Ball& ball, int n) {
  if (n < 1) throw ConfigError("cell generation must be >= 1");
  const BigInt scale = BigInt(1) << n;
  Rat A = ball.center - ball.radius, B = ball.center + ball.radius;
  UnrolledRange u;
  u.first = floor_rat(A * Rat(scale)) + 1;  // first cell with start strictly past A
  u.last = floor_rat(B * Rat(scale)) - 1;   // last cell ending at or before B
  return to_physical(u, n);
}

CellRanges outer_cells(const Ball& ball, int n) {
  if (n < 1) throw ConfigError("cell generation must be >= 1");
  const BigInt scale = BigInt(1) << n;
  Rat A = ball.center - ball.radius, B = ball.center + ball.radius;
  UnrolledRange u;
  u.first = floor_rat(A * Rat(scale));
  Rat bs = B * Rat(scale);
  BigInt ib = floor_rat(bs);
  u.last = (Rat(ib) == bs) ? ib - 1 : ib;  // open arc: an exact right endpoint stays outside
  return to_physical(u, n);
}

std::vector<Word> canonical_words(const CellRanges& ranges) {
  std::vector<Word> out;
  const int n = ranges.n;
  for (auto [begin, end] : ranges.pieces) {
    std::uint64_t b = begin;
    while (b < end) {
      // largest aligned block, capped so every emitted word has length >= 1
      int k = b == 0 ? n - 1 : std::min(static_cast<int>(std::countr_zero(b)), n - 1);
      while (k > 0 && b + (1ull << k) > end) --k;
      // block [b, b + 2^k) is the cylinder of the top n-k bits of b
      std::vector<int> symbols(static_cast<std::size_t>(n - k));
      for (int i = 0; i < n - k; ++i)
        symbols[static_cast<std::size_t>(i)] = static_cast<int>((b >> (n - 1 - i)) & 1ull);
      out.emplace_back(std::move(symbols));
      b += 1ull << k;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

Rat words_mass(const std::vector<Word>& words, const Rat& q0) {
  Rat total = 0;
  const Rat q1 = Rat(1) - q0;
  for (const auto& w : words) {
    Rat m = 1;
    for (int s : w.symbols) m *= (s == 0 ? q0 : q1);
    total += m;
  }
  return total;
}

}  // namespace

CylinderUnionPair ball_to_cylinders(const Ball& ball, int n, const Rat& q0,
                                    std::uint64_t enumeration_cap) {
  if (q0 <= 0 || q0 >= 1) throw ConfigError("coding probability must lie in (0,1)");
  if (n >= 63 || (1ull << n) > enumeration_cap)
    throw CapExceededError("cell generation exceeds the enumeration cap");
  CylinderUnionPair pair;
  pair.n = n;
  pair.inner = inner_cells(ball, n);
  pair.outer = outer_cells(ball, n);
  pair.inner_words = canonical_words(pair.inner);
  pair.outer_words = canonical_words(pair.outer);
  pair.inner_mass = words_mass(pair.inner_words, q0);
  pair.outer_mass = words_mass(pair.outer_words, q0);
  return pair;
}

Rat coding_cdf(const Rat& q0, const Rat& x) {
  if (q0 <= 0 || q0 >= 1) throw ConfigError("coding probability must lie in (0,1)");
  if (x <= 0) return Rat(0);
  if (x >= 1) return Rat(1);
  if (denominator(x) > (BigInt(1) << 24))
    throw CapExceededError("coding_cdf denominator too large for exact digit expansion");
  const Rat q1 = Rat(1) - q0;
  std::map<Rat, std::size_t> seen;
  std::vector<int> digits;
  Rat y = x;
  std::size_t cycle_start = 0;
  while (true) {
    auto it = seen.find(y);
    if (it != seen.end()) {
      cycle_start = it->second;
      break;
    }
    seen.emplace(y, digits.size());
    y *= 2;
    if (y >= 1) {
      digits.push_back(1);
      y -= 1;
    } else {
      digits.push_back(0);
    }
  }
  Rat value = 0, weight = 1;
  for (std::size_t i = 0; i < cycle_start; ++i) {
    if (digits[i] == 1) value += weight * q0;
    weight *= (digits[i] == 0 ? q0 : q1);
  }
  Rat cycle_sum = 0, cycle_weight = 1;
  for (std::size_t i = cycle_start; i < digits.size(); ++i) {
    if (digits[i] == 1) cycle_sum += cycle_weight * q0;
    cycle_weight *= (digits[i] == 0 ? q0 : q1);
  }
  value += weight * cycle_sum / (Rat(1) - cycle_weight);
  return value;
}

namespace {

// Open interval pieces of an arc inside [0,1).
std::vector<std::pair<Rat, Rat>> arc_pieces(const Rat& center, const Rat& radius) {
  Rat a = center - radius, b = center + radius;
  Rat fa = frac(a);
  Rat len = b - a;
  std::vector<std::pair<Rat, Rat>> out;
  if (fa + len <= 1) {
    out.emplace_back(fa, fa + len);
  } else {
    out.emplace_back(fa, Rat(1));
    out.emplace_back(Rat(0), fa + len - 1);
  }
  return out;
}

Rat pieces_measure(const std::vector<std::pair<Rat, Rat>>& pieces, const Rat& q0) {
  Rat total = 0;
  for (const auto& [lo, hi] : pieces) total += coding_cdf(q0, hi) - coding_cdf(q0, lo);
  return total;
}

std::vector<std::pair<Rat, Rat>> intersect_pieces(const std::vector<std::pair<Rat, Rat>>& xs,
                                                  const std::vector<std::pair<Rat, Rat>>& ys) {
  std::vector<std::pair<Rat, Rat>> out;
  for (const auto& [a, b] : xs)
    for (const auto& [c, d] : ys) {
      Rat lo = std::max(a, c), hi = std::min(b, d);
      if (lo < hi) out.emplace_back(lo, hi);
    }
  return out;
}

}  // namespace

Rat ball_measure(const Rat& q0, const Ball& ball) {
  return pieces_measure(arc_pieces(ball.center, ball.radius), q0);
}

ThetaBallEstimate theta_ball(const Rat& center, int p, const std::vector<Rat>& r_schedule,
                             const Rat& q0) {
  if (p < 1 || p > 20) throw ConfigError("period out of range");
  // Verify periodicity under doubling: 2^p c = c (mod 1).
  if (frac(center * Rat(BigInt(1) << p)) != center)
    throw ConfigError("center is not p-periodic under the doubling map");
  for (int q = 1; q < p; ++q)
    if (frac(center * Rat(BigInt(1) << q)) == center)
      throw ConfigError("p is not the prime period of the center");
  if (r_schedule.empty()) throw ConfigError("empty radius schedule");

  ThetaBallEstimate est;
  est.period = p;
  const BigInt branches = BigInt(1) << p;
  for (const auto& r : r_schedule) {
    Ball ball(center, r);
    auto base = arc_pieces(center, r);
    Rat inter_mass = 0;
    for (BigInt i = 0; i < branches; ++i) {
      Rat pre_center = frac((center + Rat(i)) / Rat(branches));
      Rat pre_radius = r / Rat(branches);
      auto piece = intersect_pieces(base, arc_pieces(pre_center, pre_radius));
      inter_mass += pieces_measure(piece, q0);
    }
    Rat mass = pieces_measure(base, q0);
    est.per_r.emplace_back(r, inter_mass / mass);
  }
  if (est.per_r.size() >= 4) {
    std::vector<double> vals;
    for (const auto& [r, ratio] : est.per_r) vals.push_back(to_double(ratio));
    est.extrapolated = extrapolate_limit(vals);
  } else {
    est.extrapolated.limit = to_double(est.per_r.back().second);
    est.extrapolated.lo = est.extrapolated.hi = est.extrapolated.limit;
    est.extrapolated.converged = true;
  }
  est.below_half = est.per_r.back().second < Rat(1, 2);
  return est;
}

double mc_ball_survival(const Rat& center, const Rat& radius, const Rat& q0, std::uint64_t t,
                        std::uint64_t trials, std::uint64_t master_seed) {
  const double zc = to_double(center);
  const double r = to_double(radius);
  const double p0 = to_double(q0);
  const int window = 52;
  const std::uint64_t digits_needed = t + window;
  std::int64_t survived = 0;
#pragma omp parallel for schedule(static) reduction(+ : survived)
  for (std::int64_t trial = 0; trial < static_cast<std::int64_t>(trials); ++trial) {
    SplitMix64 gen(derive_seed(master_seed, static_cast<std::uint64_t>(trial)));
    std::vector<int> digits(static_cast<std::size_t>(digits_needed));
    for (auto& d : digits) d = gen.uniform() < p0 ? 0 : 1;
    // 52-digit sliding window value of T^j x; dyadic, exact in a double.
    double u = 0.0;
    for (int i = window - 1; i >= 0; --i) u = (u + digits[static_cast<std::size_t>(i)]) * 0.5;
    bool hit = false;
    for (std::uint64_t j = 1; j <= t; ++j) {
      u = 2.0 * u - digits[static_cast<std::size_t>(j - 1)] +
          digits[static_cast<std::size_t>(j - 1) + window] * 0x1.0p-52;
      double d = std::abs(u - zc);
      d = std::min(d, 1.0 - d);
      if (d < r) {
        hit = true;
        break;
      }
    }
    if (!hit) ++survived;
  }
  return static_cast<double>(survived) / static_cast<double>(trials);
}

BallLReport l_ball(const Rat& center, const std::vector<Rat>& r_schedule, double alpha, double s,
                   const Rat& q0, const BallLOptions& options) {
  if (!(alpha > 0.0) || !(s > 0.0)) throw ConfigError("l_ball needs alpha > 0 and s > 0");
  if (options.v < 2) throw ConfigError("diameter coupling v must be >= 2");
  if (r_schedule.empty()) throw ConfigError("empty radius schedule");
  for (std::size_t i = 0; i + 1 < r_schedule.size(); ++i)
    if (r_schedule[i + 1] >= r_schedule[i]) throw ConfigError("radius schedule must decrease");

  BallLReport report;
  report.alpha = alpha;
  report.s = s;
  report.v = options.v;

  auto system = SymbolicSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({q0, Rat(1) - q0});

  for (const auto& r : r_schedule) {
    Ball ball(center, r);
    // smallest n with 2^-n <= r^v
    Rat rv = rat_pow(r, static_cast<std::uint64_t>(options.v));
    int n = 1;
    while (Rat(1, BigInt(1) << n) > rv && n < 60) ++n;
    BallLRow row;
    row.r = r;
    row.n = n;
    auto pair = ball_to_cylinders(ball, n, q0);
    row.inner_mass = pair.inner_mass;
    row.outer_mass = pair.outer_mass;
    row.ball_mass = ball_measure(q0, ball);

    double mu_ball = to_double(row.ball_mass);
    double scaled = s * std::pow(mu_ball, -alpha);
    if (!(scaled < 9.0e18)) {
      report.warnings.push_back("r=" + rat_string(r) + ": horizon overflow");
      break;
    }
    row.t = static_cast<std::uint64_t>(std::ceil(scaled));
    const double denom = s * std::pow(mu_ball, 1.0 - alpha);

    auto outer_hole = HoleSpec::normalized(pair.outer_words, system);
    auto outer_chain = numeric_chain<double>(compile_hole(system, mu, outer_hole, options.build));
    row.l_high = -log_survival(outer_chain, row.t, options.engine) / denom;

    if (pair.inner.count() > 0) {
      auto inner_hole = HoleSpec::normalized(pair.inner_words, system);
      auto inner_chain = numeric_chain<double>(compile_hole(system, mu, inner_hole, options.build));
      row.l_low = -log_survival(inner_chain, row.t, options.engine) / denom;
    } else {
      report.warnings.push_back("r=" + rat_string(r) + ": inner union empty, lower bound omitted");
    }

    if (options.mc_trials > 0) {
      double surv = mc_ball_survival(center, r, q0, row.t, options.mc_trials, options.master_seed);
      if (surv > 0.0) {
        row.mc_estimate = -std::log(surv) / denom;
        row.mc_tolerance = 3.0 / (std::sqrt(static_cast<double>(options.mc_trials)) * surv * denom);
        double lo = row.l_low.value_or(-std::numeric_limits<double>::infinity());
        row.mc_inside = *row.mc_estimate >= lo - row.mc_tolerance &&
                        *row.mc_estimate <= row.l_high + row.mc_tolerance;
      }
    }
    report.rows.push_back(row);
  }

  std::vector<double> lows, highs;
  for (const auto& row : report.rows) {
    if (row.l_low) lows.push_back(*row.l_low);
    highs.push_back(row.l_high);
  }
  if (lows.size() >= 4) report.low_extrapolated = extrapolate_limit(lows, options.extrap_tol);
  else if (!lows.empty()) {
    report.low_extrapolated.limit = lows.back();
    report.low_extrapolated.lo = report.low_extrapolated.hi = lows.back();
  }
  if (highs.size() >= 4) report.high_extrapolated = extrapolate_limit(highs, options.extrap_tol);
  else if (!highs.empty()) {
    report.high_extrapolated.limit = highs.back();
    report.high_extrapolated.lo = report.high_extrapolated.hi = highs.back();
  }
  return report;
}

}  // namespace reclab
