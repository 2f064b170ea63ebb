#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "reclab/rng.hpp"
#include "reclab/survival.hpp"

using namespace reclab;

namespace {

// A hole wide enough that the chain crosses the parallel-dispatch threshold.
HoleSpec wide_hole(const SymbolicSystem& sys, int words, int len, std::uint64_t seed) {
  SplitMix64 gen(seed);
  std::vector<Word> ws;
  for (int i = 0; i < words; ++i) {
    std::vector<int> symbols(static_cast<std::size_t>(len));
    for (auto& s : symbols) s = static_cast<int>(gen.next() & 1);
    ws.emplace_back(std::move(symbols));
  }
  return HoleSpec::normalized(std::move(ws), sys);
}

}  // namespace

TEST_CASE("parallel chain step is bitwise identical to the serial reference") {
  auto sys = SymbolicSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({Rat(2, 5), Rat(3, 5)});
  auto hole = wide_hole(sys, 400, 12, 11);
  auto chain = numeric_chain<double>(compile_hole(sys, mu, hole));
  REQUIRE(chain.num_states > 1000);

  std::vector<double> u(static_cast<std::size_t>(chain.num_states));
  SplitMix64 gen(5);
  for (auto& v : u) v = gen.uniform();
  for (int phase = 0; phase < hole.depth; ++phase) {
    std::vector<double> serial, parallel;
    chain_apply_serial(chain, phase, u, serial);
    chain_apply_parallel(chain, phase, u, parallel);
    CHECK(serial == parallel);
  }
}

TEST_CASE("kernel dispatch toggle does not change survival values") {
  auto sys = SymbolicSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({Rat(1, 2), Rat(1, 2)});
  auto hole = wide_hole(sys, 300, 14, 3);
  auto chain = numeric_chain<double>(compile_hole(sys, mu, hole));

  auto& settings = kernel_settings();
  bool saved = settings.parallel;
  settings.parallel = false;
  double serial_value = log_survival(chain, 50);
  settings.parallel = true;
  settings.min_parallel_states = 1;
  double parallel_value = log_survival(chain, 50);
  settings = KernelSettings{};
  settings.parallel = saved;
  CHECK(serial_value == parallel_value);
}

TEST_CASE("monte carlo histograms: serial and parallel are identical") {
  auto sys = SymbolicSystem::full_shift(2);
  auto mu = MeasureModel::markov(sys, {{Rat(9, 10), Rat(1, 10)}, {Rat(2, 10), Rat(8, 10)}});
  auto hole = HoleSpec::normalized({Word::from_string("00"), Word::from_string("101")}, sys);
  auto serial = mc_first_hit_histogram_serial(sys, mu, hole, 25, 20000, 99);
  auto parallel = mc_first_hit_histogram_parallel(sys, mu, hole, 25, 20000, 99);
  CHECK(serial == parallel);
}

TEST_CASE("rational kernel equals the double kernel after conversion") {
  auto sys = SymbolicSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({Rat(1, 4), Rat(3, 4)});
  auto compiled = compile_hole(sys, mu, wide_hole(sys, 12, 6, 21));
  auto exact = numeric_chain<Rat>(compiled);
  auto fl = numeric_chain<double>(compiled);
  auto exact_curve = survival_curve(exact, 12);
  auto float_curve = survival_curve(fl, 12);
  for (std::size_t t = 0; t < exact_curve.size(); ++t)
    CHECK(to_double(exact_curve[t]) == doctest::Approx(float_curve[t]).epsilon(1e-12));
}
