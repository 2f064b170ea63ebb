#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "reclab/survival.hpp"

using namespace reclab;

namespace {

HoleSpec hole_of(const SymbolicSystem& sys, std::initializer_list<const char*> words) {
  std::vector<Word> ws;
  for (const char* w : words) ws.push_back(Word::from_string(w));
  return HoleSpec::normalized(std::move(ws), sys);
}

const SymbolicSystem kFull = SymbolicSystem::full_shift(2);

MeasureModel markov_example() {
  return MeasureModel::markov(kFull, {{Rat(9, 10), Rat(1, 10)}, {Rat(2, 10), Rat(8, 10)}});
}

}  // namespace

TEST_CASE("survival closed forms") {
  auto b37 = MeasureModel::bernoulli({Rat(3, 10), Rat(7, 10)});
  auto chain = numeric_chain<Rat>(compile_hole(kFull, b37, hole_of(kFull, {"0"})));
  for (int t = 0; t <= 12; ++t)
    CHECK(survival_at(chain, static_cast<std::uint64_t>(t)) ==
          rat_pow(Rat(7, 10), static_cast<std::uint64_t>(t)));

  auto half = MeasureModel::bernoulli({Rat(1, 2), Rat(1, 2)});
  auto chain00 = numeric_chain<Rat>(compile_hole(kFull, half, hole_of(kFull, {"00"})));
  CHECK(survival_at(chain00, 3) == Rat(1, 2));  // 8 of 16 words of length 4 avoid 00

  auto chain00_b = numeric_chain<Rat>(compile_hole(kFull, b37, hole_of(kFull, {"00"})));
  CHECK(survival_at(chain00_b, 2) == Rat(847, 1000));
}

TEST_CASE("survival curve is monotone and matches pointwise evaluation") {
  auto mu = markov_example();
  auto chain = numeric_chain<Rat>(compile_hole(kFull, mu, hole_of(kFull, {"01", "100"})));
  auto curve = survival_curve(chain, 24);
  CHECK(curve[0] == Rat(1));
  for (std::size_t t = 0; t + 1 < curve.size(); ++t) CHECK(curve[t + 1] <= curve[t]);
  for (std::uint64_t t : {0, 1, 5, 17, 24})
    CHECK(curve[static_cast<std::size_t>(t)] == survival_at(chain, t));
}

TEST_CASE("exact engine equals brute-force enumeration") {
  auto half = MeasureModel::bernoulli({Rat(1, 2), Rat(1, 2)});
  auto markov = markov_example();
  for (const auto* mu : {&half, &markov}) {
    for (auto hole : {hole_of(kFull, {"0"}), hole_of(kFull, {"010"}), hole_of(kFull, {"00", "11"}),
                      hole_of(kFull, {"0", "1101"}), hole_of(kFull, {"0110", "10"})}) {
      auto chain = numeric_chain<Rat>(compile_hole(kFull, *mu, hole));
      auto curve = survival_curve(chain, 10);
      auto oracle = oracles::survival_bruteforce(kFull, *mu, hole, 10);
      for (int t = 0; t <= 10; ++t) CHECK(curve[static_cast<std::size_t>(t)] == oracle[static_cast<std::size_t>(t)]);
    }
  }
}

TEST_CASE("exact engine equals brute force on an sft") {
  auto gm = SymbolicSystem::sft(2, {{1, 1}, {1, 0}});
  auto mu = MeasureModel::markov(gm, {{Rat(1, 3), Rat(2, 3)}, {Rat(1), Rat(0)}});
  for (auto hole : {hole_of(gm, {"00"}), hole_of(gm, {"010", "00"})}) {
    auto chain = numeric_chain<Rat>(compile_hole(gm, mu, hole));
    auto curve = survival_curve(chain, 9);
    auto oracle = oracles::survival_bruteforce(gm, mu, hole, 9);
    for (int t = 0; t <= 9; ++t) CHECK(curve[static_cast<std::size_t>(t)] == oracle[static_cast<std::size_t>(t)]);
  }
}

TEST_CASE("scaled brute-force oracle agrees with the rational one") {
  auto markov = markov_example();
  auto hole = hole_of(kFull, {"00", "111"});
  auto plain = oracles::survival_bruteforce(kFull, markov, hole, 8);
  auto scaled = oracles::survival_bruteforce_scaled(kFull, markov, hole, 8, 30);
  for (int t = 0; t <= 8; ++t) CHECK(plain[static_cast<std::size_t>(t)] == scaled[static_cast<std::size_t>(t)]);
}

TEST_CASE("log survival agrees with exact survival and with matrix powers") {
  auto mu = markov_example();
  auto chain = compile_hole(kFull, mu, hole_of(kFull, {"00"}));
  auto exact = numeric_chain<Rat>(chain);
  auto fl = numeric_chain<double>(chain);
  for (std::uint64_t t : {1, 2, 7, 33, 200}) {
    double expected = std::log(to_double(survival_at(exact, t)));
    CHECK(log_survival(fl, t) == doctest::Approx(expected).epsilon(1e-12));
  }
  // force the dense matrix-power path and compare against iteration
  EngineOptions small_horizon;
  small_horizon.iterate_horizon = 16;
  for (std::uint64_t t : {40, 101, 1024}) {
    double by_power = log_survival(fl, t, small_horizon);
    double by_iterate = log_survival(fl, t);
    CHECK(by_power == doctest::Approx(by_iterate).epsilon(1e-11));
  }
}

TEST_CASE("escape rate closed forms") {
  auto b37 = MeasureModel::bernoulli({Rat(3, 10), Rat(7, 10)});
  auto res = escape_rate(numeric_chain<double>(compile_hole(kFull, b37, hole_of(kFull, {"0"}))));
  CHECK(res.rho == doctest::Approx(-std::log(0.7)).epsilon(1e-12));

  auto half = MeasureModel::bernoulli({Rat(1, 2), Rat(1, 2)});
  auto res00 = escape_rate(numeric_chain<double>(compile_hole(kFull, half, hole_of(kFull, {"00"}))));
  double golden = (1.0 + std::sqrt(5.0)) / 4.0;
  CHECK(res00.lambda == doctest::Approx(golden).epsilon(1e-10));
  CHECK(res00.rho == doctest::Approx(-std::log(golden)).epsilon(1e-10));
}

TEST_CASE("log-survival increments converge to the escape rate") {
  auto mu = markov_example();
  auto chain = numeric_chain<double>(compile_hole(kFull, mu, hole_of(kFull, {"010"})));
  auto esc = escape_rate(chain);
  LogSurvivalSweep sweep(chain);
  double l200 = sweep.at(200);
  double l201 = sweep.at(201);
  CHECK(std::abs(l201 - l200 + esc.rho) <= 1e-6);
}

TEST_CASE("monte carlo matches the exact curve") {
  auto b37 = MeasureModel::bernoulli({Rat(3, 10), Rat(7, 10)});
  auto hole = hole_of(kFull, {"0"});
  const int t_max = 20;
  const std::uint64_t trials = 10000;
  auto mc = monte_carlo_survival(kFull, b37, hole, t_max, trials, 12345);
  auto exact = survival_curve(numeric_chain<Rat>(compile_hole(kFull, b37, hole)), t_max);
  double bound = 3.0 / std::sqrt(static_cast<double>(trials));
  for (int t = 0; t <= t_max; ++t) {
    double diff = std::abs(mc.survival(t) - to_double(exact[static_cast<std::size_t>(t)]));
    CHECK(diff <= bound);
  }
}

TEST_CASE("monte carlo is deterministic given the master seed") {
  auto mu = markov_example();
  auto hole = hole_of(kFull, {"01"});
  auto a = monte_carlo_survival(kFull, mu, hole, 15, 5000, 777);
  auto b = monte_carlo_survival(kFull, mu, hole, 15, 5000, 777);
  CHECK(a.tau_hist == b.tau_hist);
  auto c = monte_carlo_survival(kFull, mu, hole, 15, 5000, 778);
  CHECK(a.tau_hist != c.tau_hist);
  // single trial degenerates to a 0/1 step function
  auto single = monte_carlo_survival(kFull, mu, hole, 15, 1, 3);
  for (int t = 0; t <= 15; ++t) {
    double v = single.survival(t);
    CHECK((v == 0.0 || v == 1.0));
  }
}

TEST_CASE("product relation: exact independence for a one-symbol hole") {
  auto b37 = MeasureModel::bernoulli({Rat(3, 10), Rat(7, 10)});
  auto chain = compile_hole(kFull, b37, hole_of(kFull, {"0"}));
  auto rep = product_relation_residual(chain, b37, 20, 3, 4, std::uint64_t{40});
  CHECK(rep.lemma_lhs == Rat(0));
  CHECK(rep.lemma_pass);
  CHECK(rep.kfold_pass);
}

TEST_CASE("product relation: lemma inequality on the markov example") {
  auto mu = markov_example();
  auto chain = compile_hole(kFull, mu, hole_of(kFull, {"00"}));
  auto rep = product_relation_residual(chain, mu, 24, 5, 4);
  CHECK(rep.q == 6);
  CHECK(rep.eta == doctest::Approx(6.0 / 7.0));
  CHECK(rep.lemma_pass);
  CHECK(rep.kfold_pass);
  CHECK_THROWS_AS(product_relation_residual(chain, mu, 24, 5, 13), ConfigError);  // Delta >= s/2
  CHECK_THROWS_AS(product_relation_residual(chain, mu, 24, 5, 5), ConfigError);   // s != q Delta
  CHECK_THROWS_AS(product_relation_residual(chain, mu, 24, 2, 4), ConfigError);   // k < 3
  CHECK_THROWS_AS(product_relation_residual(chain, mu, 8, 5, 2), ConfigError);    // Delta <= depth
}
