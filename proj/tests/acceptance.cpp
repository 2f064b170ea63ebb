// Acceptance suite: one check block per shipped guarantee, each printing a
// single [PASS]/[FAIL] line. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reclab/ball.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/rng.hpp"
#include "reclab/survival.hpp"

using namespace reclab;

namespace {

int failures = 0;

struct Criterion {
  std::string label;
  bool ok = true;
  std::vector<std::string> details;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      details.push_back(what);
    }
  }
};

void run_criterion(int index, const std::string& label,
                   const std::function<void(Criterion&)>& body) {
  Criterion c{label};
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.details.push_back(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %2d (%6.2fs): %s\n", c.ok ? "PASS" : "FAIL", index, secs,
              label.c_str());
  if (!c.ok) {
    ++failures;
    for (const auto& d : c.details) std::printf("         - %s\n", d.c_str());
  }
}

const SymbolicSystem kFull = SymbolicSystem::full_shift(2);

MeasureModel bern(const Rat& q) { return MeasureModel::bernoulli({q, Rat(1) - q}); }
MeasureModel markov_example() {
  return MeasureModel::markov(kFull, {{Rat(9, 10), Rat(1, 10)}, {Rat(2, 10), Rat(8, 10)}});
}

HoleSpec hole_of(std::initializer_list<const char*> words) {
  std::vector<Word> ws;
  for (const char* w : words) ws.push_back(Word::from_string(w));
  return HoleSpec::normalized(std::move(ws), kFull);
}

// Every single-cylinder hole of depth <= 4 plus seeded prefix-free unions
// with mixed depths.
std::vector<HoleSpec> depth4_hole_family() {
  std::vector<HoleSpec> holes;
  for (int n = 1; n <= 4; ++n)
    for (const auto& w : enumerate_join(kFull, n)) holes.push_back(HoleSpec::normalized({w}, kFull));
  SplitMix64 gen(20240811);
  int added = 0;
  while (added < 40) {
    // random antichain: per node of the depth-4 binary tree, stop or recurse
    std::vector<Word> words;
    std::function<void(std::vector<int>&)> walk = [&](std::vector<int>& path) {
      if (!path.empty() && (path.size() == 4 ? (gen.next() & 1) : gen.next() % 3 == 0)) {
        words.emplace_back(path);
        return;
      }
      if (path.size() == 4) return;
      for (int s = 0; s < 2; ++s) {
        path.push_back(s);
        walk(path);
        path.pop_back();
      }
    };
    std::vector<int> path;
    walk(path);
    if (words.empty()) continue;
    auto hole = HoleSpec::normalized(words, kFull);
    if (bern(Rat(1, 2)).hole_measure(hole) == Rat(1)) continue;
    holes.push_back(std::move(hole));
    ++added;
  }
  return holes;
}

}  // namespace

int main() {
  run_criterion(1, "exact engine equals brute-force enumeration (depth <= 4, t <= 16)",
                [](Criterion& c) {
                  auto half = bern(Rat(1, 2));
                  auto markov = markov_example();
                  auto holes = depth4_hole_family();
                  int checked = 0;
                  for (const auto& hole : holes) {
                    for (const auto* mu : {&half, &markov}) {
                      std::uint64_t denom = mu->kind() == MeasureModel::Kind::Bernoulli ? 2 : 30;
                      auto chain = numeric_chain<Rat>(compile_hole(kFull, *mu, hole));
                      auto curve = survival_curve(chain, 16);
                      auto oracle = oracles::survival_bruteforce_scaled(kFull, *mu, hole, 16, denom);
                      for (int t = 0; t <= 16; ++t) {
                        if (curve[static_cast<std::size_t>(t)] != oracle[static_cast<std::size_t>(t)]) {
                          c.expect(false, "mismatch at t=" + std::to_string(t) + " hole " +
                                              hole.cylinders.front().str());
                          return;
                        }
                      }
                      ++checked;
                    }
                  }
                  c.expect(checked == 2 * static_cast<int>(holes.size()),
                           "not all holes were checked");
                });

  run_criterion(2, "escape-rate closed forms (-log 0.7 and -log((1+sqrt 5)/4))",
                [](Criterion& c) {
                  auto res0 = escape_rate(
                      numeric_chain<double>(compile_hole(kFull, bern(Rat(3, 10)), hole_of({"0"}))));
                  c.expect(std::abs(res0.rho - (-std::log(0.7))) <= 1e-10,
                           "rho([0]) defect " + double_repr(std::abs(res0.rho + std::log(0.7))));
                  auto res00 = escape_rate(
                      numeric_chain<double>(compile_hole(kFull, bern(Rat(1, 2)), hole_of({"00"}))));
                  double expected = -std::log((1.0 + std::sqrt(5.0)) / 4.0);
                  c.expect(std::abs(res00.rho - expected) <= 1e-8,
                           "rho([00]) defect " + double_repr(std::abs(res00.rho - expected)));
                });

  run_criterion(3, "theta values exact; boundary theta = 1/2 flagged", [](Criterion& c) {
    auto t1 = theta(PointSpec::periodic({0}), 1, bern(Rat(3, 10)), kFull, {2, 12});
    c.expect(t1.limit == Rat(3, 10), "theta(0^inf) != 3/10 under Bernoulli(0.3,0.7)");
    c.expect(t1.below_half, "theta 0.3 not reported below 1/2");
    auto t2 = theta(PointSpec::periodic({0, 1}), 2, bern(Rat(1, 2)), kFull, {2, 12});
    c.expect(t2.limit == Rat(1, 4), "theta((01)^inf) != 1/4 under Bernoulli(0.5,0.5)");
    auto t3 = theta(PointSpec::periodic({0}), 1, bern(Rat(1, 2)), kFull, {2, 12});
    c.expect(t3.limit == Rat(1, 2), "theta(0^inf) != 1/2 under Bernoulli(0.5,0.5)");
    c.expect(!t3.below_half, "boundary case must be flagged as not below 1/2");
  });

  run_criterion(
      4, "dichotomy at desk scale: L -> 1-theta (periodic) and L -> 1 (thue-morse)",
      [](Criterion& c) {
        auto zero = PointSpec::periodic({0});
        auto tm = PointSpec::stream("thue-morse", 0);
        auto b37 = bern(Rat(3, 10));
        auto half = bern(Rat(1, 2));
        for (double alpha : {0.5, 1.0, 2.0}) {
          for (double s : {1.0, 2.0}) {
            auto periodic_curve = l_alpha_s(zero, alpha, s, b37, kFull, {2, 14});
            c.expect(std::abs(periodic_curve.extrapolated.limit - 0.7) <= 0.05,
                     "periodic L(alpha=" + double_repr(alpha) + ",s=" + double_repr(s) +
                         ") = " + double_repr(periodic_curve.extrapolated.limit) +
                         " not within 0.05 of 0.7");
            auto tm_curve = l_alpha_s(tm, alpha, s, half, kFull, {2, 14});
            c.expect(std::abs(tm_curve.extrapolated.limit - 1.0) <= 0.1,
                     "thue-morse L(alpha=" + double_repr(alpha) + ",s=" + double_repr(s) +
                         ") = " + double_repr(tm_curve.extrapolated.limit) +
                         " not within 0.1 of 1");
          }
        }
      });

  run_criterion(5, "union identity exact on the aligned grid (k p <= n <= 6, k <= 4)",
                [](Criterion& c) {
                  auto zero = PointSpec::periodic({0});
                  auto alt = PointSpec::periodic({0, 1});
                  auto b37 = bern(Rat(3, 10));
                  auto half = bern(Rat(1, 2));
                  auto worked = union_measure_check(zero, 1, 2, 2, b37, kFull);
                  c.expect(worked.exact == Rat(27, 125) && worked.prediction == Rat(27, 125),
                           "worked example (n=2,k=2,q=0.3) is not 0.216 on both sides");
                  for (int n = 1; n <= 6; ++n)
                    for (int k = 0; k <= 4; ++k) {
                      if (k * 1 <= n) {
                        auto rep = union_measure_check(zero, 1, n, k, b37, kFull);
                        c.expect(rep.defect == Rat(0), "defect at p=1 n=" + std::to_string(n) +
                                                           " k=" + std::to_string(k));
                      }
                      if (k * 2 <= n) {
                        auto rep = union_measure_check(alt, 2, n, k, half, kFull);
                        c.expect(rep.defect == Rat(0), "defect at p=2 n=" + std::to_string(n) +
                                                           " k=" + std::to_string(k));
                      }
                    }
                });

  run_criterion(6, "localized escape rate decreases to 1-theta (n = 14 within 0.02)",
                [](Criterion& c) {
                  auto curve =
                      localized_escape_rate(PointSpec::periodic({0}), bern(Rat(3, 10)), kFull, {1, 14});
                  for (std::size_t i = 0; i + 1 < curve.per_n.size(); ++i)
                    c.expect(curve.per_n[i + 1].ratio <= curve.per_n[i].ratio + 1e-12,
                             "ratio increased between n=" + std::to_string(curve.per_n[i].n) +
                                 " and n=" + std::to_string(curve.per_n[i + 1].n));
                  double last = curve.per_n.back().ratio;
                  c.expect(std::abs(last - 0.7) <= 0.02,
                           "ratio at n=14 is " + double_repr(last) + ", not within 0.02 of 0.7");
                });

  run_criterion(7, "phi coefficients: bernoulli vanish, markov matches brute force, rate 0.7",
                [](Criterion& c) {
                  auto b37 = bern(Rat(3, 10));
                  for (int k = 1; k <= 10; ++k) {
                    c.expect(phi_coefficient_exact(b37, k, Side::Left) == Rat(0),
                             "bernoulli left phi nonzero at k=" + std::to_string(k));
                    c.expect(phi_coefficient_exact(b37, k, Side::Right) == Rat(0),
                             "bernoulli right phi nonzero at k=" + std::to_string(k));
                  }
                  auto markov = markov_example();
                  for (int k = 1; k <= 5; ++k)
                    for (Side side : {Side::Left, Side::Right}) {
                      Rat diff = rat_abs(phi_coefficient_exact(markov, k, side) -
                                         phi_coefficient_bruteforce(markov, kFull, k, side, 5));
                      c.expect(diff <= Rat(1, 10000000000ll),
                               "exact/brute-force gap at k=" + std::to_string(k));
                    }
                  auto prof = build_phi_profile(markov, 24, Side::Left);
                  c.expect(prof.fit.kind == DecayFit::Kind::Exponential,
                           "markov profile not classified exponential");
                  c.expect(std::abs(prof.fit.rate - 0.7) <= 0.014,
                           "fitted rate " + double_repr(prof.fit.rate) + " not within 2% of 0.7");
                });

  run_criterion(8, "factorization inequality on the (U, s, t, Delta) sweep", [](Criterion& c) {
    auto b37 = bern(Rat(3, 10));
    auto markov = markov_example();
    struct Sweep {
      const MeasureModel* mu;
      HoleSpec hole;
    };
    std::vector<Sweep> sweeps = {{&b37, hole_of({"0"})},   {&b37, hole_of({"00"})},
                                 {&b37, hole_of({"01"})},  {&markov, hole_of({"00"})},
                                 {&markov, hole_of({"01"})}};
    int grid_points = 0;
    for (const auto& sw : sweeps) {
      auto chain = compile_hole(kFull, *sw.mu, sw.hole, {});
      for (int delta : {3, 4, 6}) {
        if (delta <= chain.max_word_len) continue;
        for (int q : {3, 5, 8}) {
          int s = q * delta;
          for (int k : {3, 5}) {
            auto rep = product_relation_residual(chain, *sw.mu, s, k, delta);
            c.expect(rep.lemma_pass, "lemma inequality failed at s=" + std::to_string(s) +
                                         " delta=" + std::to_string(delta));
            c.expect(rep.kfold_pass, "k-fold bound failed at s=" + std::to_string(s) +
                                         " k=" + std::to_string(k));
            ++grid_points;
          }
        }
      }
    }
    c.expect(grid_points >= 60, "sweep too small: " + std::to_string(grid_points));
    // exact independence: one-symbol hole under Bernoulli factorizes exactly
    auto chain0 = compile_hole(kFull, b37, hole_of({"0"}), {});
    auto rep = product_relation_residual(chain0, b37, 20, 3, 4, std::uint64_t{40});
    c.expect(rep.lemma_lhs == Rat(0), "one-symbol Bernoulli hole: lemma LHS is not exactly 0");
  });

  run_criterion(9, "ball sandwich: shrinking bracket, centre near 0.7, monte carlo inside",
                [](Criterion& c) {
                  std::vector<Rat> schedule;
                  for (int m = 3; m <= 9; ++m) schedule.push_back(Rat(1, BigInt(1) << m));
                  BallLOptions opts;
                  opts.mc_trials = 100000;
                  opts.master_seed = 90210;
                  auto rep = l_ball(Rat(0), schedule, 1.0, 1.0, Rat(3, 10), opts);
                  c.expect(rep.rows.size() == schedule.size(), "missing rows");
                  double prev_width = 1e18;
                  for (const auto& row : rep.rows) {
                    c.expect(row.l_low.has_value(), "inner union empty at r=" + rat_string(row.r));
                    if (!row.l_low) continue;
                    // exact containment of the cylinder sandwich
                    c.expect(row.inner_mass <= row.ball_mass && row.ball_mass <= row.outer_mass,
                             "mass sandwich violated at r=" + rat_string(row.r));
                    double width = row.l_high - *row.l_low;
                    c.expect(width <= prev_width + 1e-12,
                             "bracket width grew at r=" + rat_string(row.r));
                    prev_width = width;
                    c.expect(row.mc_estimate.has_value(), "monte carlo estimate missing");
                    if (row.mc_estimate)
                      c.expect(row.mc_inside, "monte carlo estimate outside the bracket at r=" +
                                                  rat_string(row.r));
                  }
                  const auto& last = rep.rows.back();
                  double centre = (*last.l_low + last.l_high) / 2.0;
                  c.expect(std::abs(centre - 0.7) <= 0.07,
                           "bracket centre " + double_repr(centre) + " not within 0.07 of 0.7");
                });

  run_criterion(10, "monte carlo sup-distance <= 3/sqrt(N) and bit-identical replays",
                [](Criterion& c) {
                  const std::uint64_t trials = 100000;
                  const double bound = 3.0 / std::sqrt(static_cast<double>(trials));
                  struct Instance {
                    MeasureModel mu;
                    HoleSpec hole;
                    std::uint64_t seed;
                  };
                  std::vector<Instance> instances;
                  instances.push_back({bern(Rat(3, 10)), hole_of({"0"}), 1001});
                  instances.push_back({bern(Rat(1, 2)), hole_of({"00"}), 1002});
                  instances.push_back({markov_example(), hole_of({"01"}), 1003});
                  for (const auto& inst : instances) {
                    const int t_max = 20;
                    auto mc = monte_carlo_survival(kFull, inst.mu, inst.hole, t_max, trials,
                                                   inst.seed);
                    auto exact =
                        survival_curve(numeric_chain<Rat>(compile_hole(kFull, inst.mu, inst.hole)),
                                       t_max);
                    double sup = 0.0;
                    for (int t = 0; t <= t_max; ++t)
                      sup = std::max(sup, std::abs(mc.survival(t) -
                                                   to_double(exact[static_cast<std::size_t>(t)])));
                    c.expect(sup <= bound, "sup distance " + double_repr(sup) + " exceeds " +
                                               double_repr(bound));
                    auto again = monte_carlo_survival(kFull, inst.mu, inst.hole, t_max, trials,
                                                      inst.seed);
                    c.expect(mc.tau_hist == again.tau_hist, "replay is not bit-identical");
                  }
                });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures;
}
