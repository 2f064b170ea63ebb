#include "reclab/kernels.hpp"

#include <omp.h>

#include "reclab/rng.hpp"

namespace reclab {

template <class S>
NumericChain<S> numeric_chain(const OpenChain& chain) {
  NumericChain<S> out;
  out.alphabet = chain.alphabet;
  out.num_states = chain.num_states;
  out.max_word_len = chain.max_word_len;
  out.next = chain.next;
  out.det_len = chain.det_len;
  out.prob.reserve(chain.prob.size());
  for (const auto& p : chain.prob) {
    if constexpr (std::is_same_v<S, double>)
      out.prob.push_back(to_double(p));
    else
      out.prob.push_back(p);
  }
  out.init.reserve(chain.init.size());
  for (const auto& p : chain.init) {
    if constexpr (std::is_same_v<S, double>)
      out.init.push_back(to_double(p));
    else
      out.init.push_back(p);
  }
  if constexpr (std::is_same_v<S, double>)
    out.hole_measure = to_double(chain.hole_measure);
  else
    out.hole_measure = chain.hole_measure;
  return out;
}

template NumericChain<double> numeric_chain<double>(const OpenChain&);
template NumericChain<Rat> numeric_chain<Rat>(const OpenChain&);

KernelSettings& kernel_settings() {
  static KernelSettings settings;
  return settings;
}

namespace {

template <class S>
inline S row_value(const NumericChain<S>& chain, int phase, const std::vector<S>& in, int s) {
  const int a = chain.alphabet;
  const std::size_t base = static_cast<std::size_t>(s) * a;
  S acc{};
  for (int sym = 0; sym < a; ++sym) {
    const std::size_t slot = base + sym;
    if (chain.next[slot] < 0) continue;
    if (chain.det_len[slot] > phase) continue;
    acc += chain.prob[slot] * in[static_cast<std::size_t>(chain.next[slot])];
  }
  return acc;
}

}  // namespace

template <class S>
void chain_apply_serial(const NumericChain<S>& chain, int phase, const std::vector<S>& in,
                        std::vector<S>& out) {
  out.resize(in.size());
  for (int s = 0; s < chain.num_states; ++s) out[static_cast<std::size_t>(s)] = row_value(chain, phase, in, s);
}

template <class S>
void chain_apply_parallel(const NumericChain<S>& chain, int phase, const std::vector<S>& in,
                          std::vector<S>& out) {
  out.resize(in.size());
#pragma omp parallel for schedule(static)
  for (int s = 0; s < chain.num_states; ++s) out[static_cast<std::size_t>(s)] = row_value(chain, phase, in, s);
}

template <class S>
void chain_apply(const NumericChain<S>& chain, int phase, const std::vector<S>& in,
                 std::vector<S>& out) {
  const auto& settings = kernel_settings();
  if (settings.parallel && chain.num_states >= settings.min_parallel_states)
    chain_apply_parallel(chain, phase, in, out);
  else
    chain_apply_serial(chain, phase, in, out);
}

template void chain_apply_serial<double>(const NumericChain<double>&, int, const std::vector<double>&, std::vector<double>&);
template void chain_apply_serial<Rat>(const NumericChain<Rat>&, int, const std::vector<Rat>&, std::vector<Rat>&);
template void chain_apply_parallel<double>(const NumericChain<double>&, int, const std::vector<double>&, std::vector<double>&);
template void chain_apply_parallel<Rat>(const NumericChain<Rat>&, int, const std::vector<Rat>&, std::vector<Rat>&);
template void chain_apply<double>(const NumericChain<double>&, int, const std::vector<double>&, std::vector<double>&);
template void chain_apply<Rat>(const NumericChain<Rat>&, int, const std::vector<Rat>&, std::vector<Rat>&);

namespace {

struct SamplerTables {
  int alphabet;
  std::vector<double> init_cdf;
  std::vector<double> row_cdf;  // alphabet x alphabet

  explicit SamplerTables(const MeasureModel& mu) : alphabet(mu.alphabet_size()) {
    init_cdf.resize(static_cast<std::size_t>(alphabet));
    double acc = 0;
    for (int s = 0; s < alphabet; ++s) {
      acc += to_double(mu.initial(s));
      init_cdf[static_cast<std::size_t>(s)] = acc;
    }
    row_cdf.resize(static_cast<std::size_t>(alphabet) * alphabet);
    for (int i = 0; i < alphabet; ++i) {
      acc = 0;
      for (int j = 0; j < alphabet; ++j) {
        acc += to_double(mu.transition(i, j));
        row_cdf[static_cast<std::size_t>(i) * alphabet + j] = acc;
      }
    }
  }

  int pick(const double* cdf, double u) const {
    for (int s = 0; s < alphabet - 1; ++s)
      if (u < cdf[s]) return s;
    return alphabet - 1;
  }

  int first(SplitMix64& gen) const { return pick(init_cdf.data(), gen.uniform()); }
  int step(SplitMix64& gen, int last) const {
    return pick(row_cdf.data() + static_cast<std::size_t>(last) * alphabet, gen.uniform());
  }
};

// tau for one seeded trial, or 0 if censored beyond t_max.
int one_trial(const SamplerTables& tables, const HoleSpec& hole, int t_max, std::uint64_t seed) {
  SplitMix64 gen(seed);
  const int window = t_max + hole.depth - 1;
  std::vector<int> symbols(static_cast<std::size_t>(window));
  symbols[0] = tables.first(gen);
  for (int i = 1; i < window; ++i) symbols[static_cast<std::size_t>(i)] = tables.step(gen, symbols[static_cast<std::size_t>(i - 1)]);
  for (int j = 1; j <= t_max; ++j) {
    for (const auto& w : hole.cylinders) {
      const int len = w.length();
      if (j - 1 + len > window) continue;
      bool match = true;
      for (int i = 0; i < len; ++i) {
        if (symbols[static_cast<std::size_t>(j - 1 + i)] != w.symbols[static_cast<std::size_t>(i)]) {
          match = false;
          break;
        }
      }
      if (match) return j;
    }
  }
  return 0;
}

}  // namespace

std::vector<std::uint64_t> mc_first_hit_histogram_serial(const SymbolicSystem& system,
                                                         const MeasureModel& mu,
                                                         const HoleSpec& hole, int t_max,
                                                         std::uint64_t trials,
                                                         std::uint64_t master_seed) {
  (void)system;
  SamplerTables tables(mu);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(t_max) + 1, 0);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    int tau = one_trial(tables, hole, t_max, derive_seed(master_seed, trial));
    if (tau > 0) ++hist[static_cast<std::size_t>(tau)];
  }
  return hist;
}

std::vector<std::uint64_t> mc_first_hit_histogram_parallel(const SymbolicSystem& system,
                                                           const MeasureModel& mu,
                                                           const HoleSpec& hole, int t_max,
                                                           std::uint64_t trials,
                                                           std::uint64_t master_seed) {
  (void)system;
  SamplerTables tables(mu);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(t_max) + 1, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(hist.size(), 0);
#pragma omp for schedule(static)
    for (std::int64_t trial = 0; trial < static_cast<std::int64_t>(trials); ++trial) {
      int tau = one_trial(tables, hole, t_max, derive_seed(master_seed, static_cast<std::uint64_t>(trial)));
      if (tau > 0) ++local[static_cast<std::size_t>(tau)];
    }
#pragma omp critical
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] += local[i];
  }
  return hist;
}

std::vector<std::uint64_t> mc_first_hit_histogram(const SymbolicSystem& system,
                                                  const MeasureModel& mu, const HoleSpec& hole,
                                                  int t_max, std::uint64_t trials,
                                                  std::uint64_t master_seed) {
  if (kernel_settings().parallel && trials >= 4096)
    return mc_first_hit_histogram_parallel(system, mu, hole, t_max, trials, master_seed);
  return mc_first_hit_histogram_serial(system, mu, hole, t_max, trials, master_seed);
}

}  // namespace reclab
