// Serial vs OpenMP timings for the two data-parallel kernels: the absorbing
// chain step and the Monte Carlo first-hit sampler. Also asserts that both
// variants produce identical results before timing them.

#include <omp.h>

#include <cstdio>
#include <vector>

#include "reclab/kernels.hpp"
#include "reclab/rng.hpp"
#include "reclab/survival.hpp"

using namespace reclab;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    double t0 = omp_get_wtime();
    fn();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int word_count = argc > 1 ? std::atoi(argv[1]) : 1500;
  int word_len = 16;
  std::uint64_t trials = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 200000;

  auto system = SymbolicSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({Rat(1, 2), Rat(1, 2)});

  // A wide hole: many long words -> a chain with tens of thousands of states.
  std::vector<Word> words;
  SplitMix64 gen(7);
  for (int i = 0; i < word_count; ++i) {
    std::vector<int> symbols(static_cast<std::size_t>(word_len));
    for (auto& s : symbols) s = gen.next() & 1;
    words.emplace_back(std::move(symbols));
  }
  auto hole = HoleSpec::normalized(words, system);
  ChainBuildOptions build;
  auto chain = numeric_chain<double>(compile_hole(system, mu, hole, build));
  std::printf("chain states: %d (hole of %zu words, depth %d)\n", chain.num_states,
              hole.cylinders.size(), hole.depth);

  std::vector<double> in(static_cast<std::size_t>(chain.num_states), 1.0), out_s, out_p;
  chain_apply_serial(chain, 0, in, out_s);
  chain_apply_parallel(chain, 0, in, out_p);
  if (out_s != out_p) {
    std::printf("FAIL: kernel results differ\n");
    return 1;
  }

  const int steps = 200;
  double t_serial = time_of(
      [&] {
        std::vector<double> u = in, scratch;
        for (int i = 0; i < steps; ++i) {
          chain_apply_serial(chain, 0, u, scratch);
          u.swap(scratch);
        }
      },
      3);
  double t_parallel = time_of(
      [&] {
        std::vector<double> u = in, scratch;
        for (int i = 0; i < steps; ++i) {
          chain_apply_parallel(chain, 0, u, scratch);
          u.swap(scratch);
        }
      },
      3);
  std::printf("chain_apply x%d   serial %.4fs   openmp %.4fs   speedup %.2fx\n", steps, t_serial,
              t_parallel, t_serial / t_parallel);

  int t_max = 30;
  auto h_serial = mc_first_hit_histogram_serial(system, mu, hole, t_max, trials, 42);
  auto h_parallel = mc_first_hit_histogram_parallel(system, mu, hole, t_max, trials, 42);
  if (h_serial != h_parallel) {
    std::printf("FAIL: Monte Carlo histograms differ\n");
    return 1;
  }
  double m_serial = time_of(
      [&] { mc_first_hit_histogram_serial(system, mu, hole, t_max, trials, 42); }, 3);
  double m_parallel = time_of(
      [&] { mc_first_hit_histogram_parallel(system, mu, hole, t_max, trials, 42); }, 3);
  std::printf("monte_carlo %llu  serial %.4fs   openmp %.4fs   speedup %.2fx\n",
              static_cast<unsigned long long>(trials), m_serial, m_parallel,
              m_serial / m_parallel);
  std::printf("threads: %d\n", omp_get_max_threads());
  return 0;
}
