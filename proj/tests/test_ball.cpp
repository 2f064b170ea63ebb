#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "reclab/ball.hpp"
#include "reclab/rng.hpp"

using namespace reclab;

namespace {

std::set<std::string> word_set(const std::vector<Word>& words) {
  std::set<std::string> out;
  for (const auto& w : words) out.insert(w.str());
  return out;
}

// All generation-n cells whose word has the given prefix set, expanded.
std::set<std::uint64_t> cells_of(const CellRanges& r) {
  std::set<std::uint64_t> out;
  for (auto [b, e] : r.pieces)
    for (std::uint64_t i = b; i < e; ++i) out.insert(i);
  return out;
}

bool cell_subset_of_arc(std::uint64_t i, int n, const Ball& ball) {
  // exact check on a fine probe grid plus endpoints
  Rat u(BigInt(i), BigInt(1) << n);
  Rat w(BigInt(i) + 1, BigInt(1) << n);
  // endpoints and midpoint membership in the closed/open sense
  auto inside_open = [&](const Rat& x) { return circle_distance(x, ball.center) < ball.radius; };
  if (!inside_open(u)) return false;
  if (circle_distance(w, ball.center) > ball.radius) return false;
  // antipode inside the cell makes containment impossible for r < 1/2
  Rat anti = ball.center + Rat(1, 2);
  if (anti >= 1) anti -= 1;
  if (u <= anti && anti < w) return false;
  return true;
}

bool cell_meets_arc(std::uint64_t i, int n, const Ball& ball) {
  Rat u(BigInt(i), BigInt(1) << n);
  Rat w(BigInt(i) + 1, BigInt(1) << n);
  if (circle_distance(u, ball.center) < ball.radius) return true;
  if (circle_distance(w, ball.center) < ball.radius) return true;
  return u <= ball.center && ball.center < w;
}

}  // namespace

TEST_CASE("ball_to_cylinders matches the worked example at n = 3") {
  Ball ball(Rat(0), Rat(1, 4));
  auto pair = ball_to_cylinders(ball, 3, Rat(1, 2));
  CHECK(cells_of(pair.inner) == std::set<std::uint64_t>{0, 1, 7});
  CHECK(cells_of(pair.outer) == std::set<std::uint64_t>{0, 1, 6, 7});
  CHECK(pair.inner_mass == Rat(3, 8));
  CHECK(pair.outer_mass == Rat(4, 8));
}

TEST_CASE("wide ball at n = 1: empty inner, full outer") {
  Ball ball(Rat(0), Rat(1, 2) - Rat(1, 1024));
  auto pair = ball_to_cylinders(ball, 1, Rat(1, 2));
  CHECK(pair.inner.count() == 0);
  CHECK(cells_of(pair.outer) == std::set<std::uint64_t>{0, 1});
}

TEST_CASE("off-centre ball masses and boundary bound") {
  Ball ball(Rat(1, 3), Rat(1, 8));
  auto pair = ball_to_cylinders(ball, 5, Rat(1, 2));
  CHECK(pair.inner_mass <= Rat(1, 4));
  CHECK(pair.inner_mass <= pair.outer_mass);
  CHECK(pair.outer_mass - pair.inner_mass <= 2 * Rat(1, 32));
}

TEST_CASE("sandwich invariant on random rational balls") {
  SplitMix64 gen(31337);
  for (int rep = 0; rep < 60; ++rep) {
    std::uint64_t cd = 2 + gen.next() % 97;
    Rat center(BigInt(gen.next() % cd), BigInt(cd));
    std::uint64_t rd = 5 + gen.next() % 95;
    Rat radius(BigInt(1 + gen.next() % (rd / 2 + 1)), BigInt(rd));
    if (radius >= Rat(1, 2)) radius = Rat(1, 2) - Rat(1, rd * 3);
    if (radius <= 0) continue;
    Ball ball(center, radius);
    int n = 2 + static_cast<int>(gen.next() % 7);
    auto pair = ball_to_cylinders(ball, n, Rat(3, 10));
    auto inner = cells_of(pair.inner);
    auto outer = cells_of(pair.outer);
    for (auto c : inner) CHECK(outer.count(c));
    // exact cell-by-cell classification, brute force
    for (std::uint64_t i = 0; i < (1ull << n); ++i) {
      CHECK(inner.count(i) == (cell_subset_of_arc(i, n, ball) ? 1 : 0));
      CHECK(outer.count(i) == (cell_meets_arc(i, n, ball) ? 1 : 0));
    }
    // boundary gap: the two unions differ by at most two cells
    CHECK(outer.size() - inner.size() <= 2);
  }
}

TEST_CASE("canonical words cover the ranges exactly") {
  SplitMix64 gen(5);
  for (int rep = 0; rep < 40; ++rep) {
    int n = 3 + static_cast<int>(gen.next() % 8);
    std::uint64_t total = 1ull << n;
    std::uint64_t b = gen.next() % total;
    std::uint64_t e = b + 1 + gen.next() % (total - b);
    CellRanges ranges;
    ranges.n = n;
    ranges.pieces.emplace_back(b, e);
    auto words = canonical_words(ranges);
    // expand back to cells
    std::set<std::uint64_t> cells;
    for (const auto& w : words) {
      int k = n - w.length();
      std::uint64_t base = 0;
      for (int s : w.symbols) base = (base << 1) | static_cast<std::uint64_t>(s);
      base <<= k;
      for (std::uint64_t i = 0; i < (1ull << k); ++i) cells.insert(base + i);
    }
    std::set<std::uint64_t> expected;
    for (std::uint64_t i = b; i < e; ++i) expected.insert(i);
    CHECK(cells == expected);
    // prefix-freeness
    auto hole = HoleSpec::normalized(words, SymbolicSystem::full_shift(2));
    CHECK(word_set(hole.cylinders) == word_set(words));
  }
}

TEST_CASE("coding agrees with dyadic cells on seeded rationals") {
  SplitMix64 gen(99);
  for (int rep = 0; rep < 10000; ++rep) {
    std::uint64_t den = 2 + gen.next() % 4096;
    std::uint64_t num = gen.next() % den;
    Rat x = Rat(BigInt(num), BigInt(den));
    int n = 1 + static_cast<int>(gen.next() % 12);
    auto digits = doubling_digits(x, n);
    std::uint64_t cell = 0;
    for (int d : digits) cell = (cell << 1) | static_cast<std::uint64_t>(d);
    // the dyadic cell of x at generation n is floor(x 2^n)
    Rat scaled = x * Rat(BigInt(1) << n);
    BigInt expected = numerator(scaled) / denominator(scaled);
    CHECK(BigInt(cell) == expected);
  }
}

TEST_CASE("coding cdf: Lebesgue is the identity, masses add up") {
  SplitMix64 gen(123);
  for (int rep = 0; rep < 200; ++rep) {
    std::uint64_t den = 2 + gen.next() % 999;
    Rat x(BigInt(gen.next() % den), BigInt(den));
    CHECK(coding_cdf(Rat(1, 2), x) == x);
  }
  // q-weighted: cylinder masses via cdf differences
  Rat q(3, 10);
  CHECK(coding_cdf(q, Rat(1)) == Rat(1));
  CHECK(coding_cdf(q, Rat(1, 2)) == q);
  CHECK(coding_cdf(q, Rat(1, 4)) == q * q);
  CHECK(coding_cdf(q, Rat(3, 4)) == q + (Rat(1) - q) * q);
  CHECK(coding_cdf(q, Rat(1, 3)) - coding_cdf(q, Rat(0)) +
            (coding_cdf(q, Rat(1)) - coding_cdf(q, Rat(1, 3))) ==
        Rat(1));
}

TEST_CASE("ball measure equals the cylinder sandwich limits") {
  Ball ball(Rat(0), Rat(1, 8));
  Rat q(3, 10);
  Rat mass = ball_measure(q, ball);
  for (int n = 4; n <= 12; ++n) {
    auto pair = ball_to_cylinders(ball, n, q);
    CHECK(pair.inner_mass <= mass);
    CHECK(mass <= pair.outer_mass);
  }
  // exact value: (0,1/8) carries q^3 and (1-1/8, 1) carries (1-q)^3
  CHECK(mass == q * q * q + (Rat(1) - q) * (Rat(1) - q) * (Rat(1) - q));
}

TEST_CASE("growth diagnostic: mu(B_{r+r^v}) / mu(B_r) stays close to 1") {
  for (int m = 3; m <= 9; ++m) {
    Rat r(1, BigInt(1) << m);
    Rat rv = r * r;  // v = 2
    // Lebesgue: ratio is exactly (r + r^v) / r = 1 + r
    Ball small(Rat(0), r);
    Ball big(Rat(0), r + rv);
    Rat ratio = ball_measure(Rat(1, 2), big) / ball_measure(Rat(1, 2), small);
    CHECK(ratio == Rat(1) + r);
    CHECK(ratio <= Rat(1) + 2 * r);  // 2 r^{v-1}
  }
}

TEST_CASE("theta_ball closed forms") {
  std::vector<Rat> rs = {Rat(1, 8), Rat(1, 16), Rat(1, 32), Rat(1, 64), Rat(1, 128)};
  auto lebesgue_fixed = theta_ball(Rat(0), 1, rs, Rat(1, 2));
  for (const auto& [r, ratio] : lebesgue_fixed.per_r) CHECK(ratio == Rat(1, 2));
  CHECK_FALSE(lebesgue_fixed.below_half);

  auto coded = theta_ball(Rat(0), 1, rs, Rat(3, 10));
  CHECK(std::abs(coded.extrapolated.limit - 0.3) < 0.01);
  CHECK(coded.below_half);

  auto third = theta_ball(Rat(1, 3), 2, rs, Rat(1, 2));
  for (const auto& [r, ratio] : third.per_r) CHECK(ratio == Rat(1, 4));

  CHECK_THROWS_AS(theta_ball(Rat(1, 3), 1, rs, Rat(1, 2)), ConfigError);
  CHECK_THROWS_AS(theta_ball(Rat(1, 3), 4, rs, Rat(1, 2)), ConfigError);  // prime period is 2
}

TEST_CASE("l_ball bracket closes on the periodic dichotomy value") {
  std::vector<Rat> schedule;
  for (int m = 3; m <= 8; ++m) schedule.push_back(Rat(1, BigInt(1) << m));
  BallLOptions opts;
  opts.mc_trials = 20000;
  opts.master_seed = 2718;
  auto rep = l_ball(Rat(0), schedule, 1.0, 1.0, Rat(3, 10), opts);
  REQUIRE(rep.rows.size() == schedule.size());
  double prev_width = 1e9;
  for (const auto& row : rep.rows) {
    REQUIRE(row.l_low.has_value());
    CHECK(*row.l_low <= row.l_high);
    double width = row.l_high - *row.l_low;
    CHECK(width <= prev_width + 1e-9);
    prev_width = width;
    if (row.mc_estimate) CHECK(row.mc_inside);
  }
  const auto& last = rep.rows.back();
  double center = (*last.l_low + last.l_high) / 2.0;
  CHECK(std::abs(center - 0.7) < 0.07);
}

TEST_CASE("l_ball alpha independence at the fixed point") {
  std::vector<Rat> schedule;
  for (int m = 3; m <= 6; ++m) schedule.push_back(Rat(1, BigInt(1) << m));
  BallLOptions opts;
  auto a_half = l_ball(Rat(0), schedule, 0.5, 1.0, Rat(3, 10), opts);
  auto a_two = l_ball(Rat(0), schedule, 2.0, 1.0, Rat(3, 10), opts);
  auto center = [](const BallLReport& r) {
    const auto& row = r.rows.back();
    return (row.l_low.value() + row.l_high) / 2.0;
  };
  double w = a_half.rows.back().l_high - *a_half.rows.back().l_low +
             a_two.rows.back().l_high - *a_two.rows.back().l_low;
  CHECK(std::abs(center(a_half) - center(a_two)) <= w);
}

TEST_CASE("thue-morse center gives a non-periodic ball point") {
  Rat z = Ball::thue_morse_center();
  auto digits = doubling_digits(z, 16);
  std::vector<int> expected = {0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0};
  CHECK(digits == expected);

  std::vector<Rat> schedule;
  for (int m = 4; m <= 8; ++m) schedule.push_back(Rat(1, BigInt(1) << m));
  BallLOptions opts;
  auto rep = l_ball(z, schedule, 1.0, 1.0, Rat(1, 2), opts);
  const auto& last = rep.rows.back();
  REQUIRE(last.l_low.has_value());
  double center = (*last.l_low + last.l_high) / 2.0;
  CHECK(std::abs(center - 1.0) < 0.1);
}
