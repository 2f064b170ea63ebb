#pragma once

#include <cstdint>
#include <vector>

#include "reclab/open_chain.hpp"

namespace reclab {

/// Numeric working copy of an OpenChain (S = double or Rat).
template <class S>
struct NumericChain {
  int alphabet = 0;
  int num_states = 0;
  int max_word_len = 0;
  std::vector<std::int32_t> next;
  std::vector<S> prob;
  std::vector<std::int16_t> det_len;
  std::vector<S> init;
  S hole_measure{};
};

template <class S>
NumericChain<S> numeric_chain(const OpenChain& chain);

struct KernelSettings {
  bool parallel = true;
  // Chains smaller than this run serially; the fork/join overhead dominates.
  int min_parallel_states = 4096;
};

KernelSettings& kernel_settings();

/// One survival step, pulled back through the chain:
///   out[s] = sum_a [det_len(s,a) <= phase] prob(s,a) * in[next(s,a)].
/// phase 0 is a fully absorbing step; phase d >= 1 is the d-th trailing step,
/// where only patterns of length > d can still complete an occurrence that
/// started inside the observation window.
///
/// The parallel variant assigns whole output rows to threads, so its result
/// is bitwise identical to the serial reference.
template <class S>
void chain_apply_serial(const NumericChain<S>& chain, int phase, const std::vector<S>& in,
                        std::vector<S>& out);
template <class S>
void chain_apply_parallel(const NumericChain<S>& chain, int phase, const std::vector<S>& in,
                          std::vector<S>& out);
template <class S>
void chain_apply(const NumericChain<S>& chain, int phase, const std::vector<S>& in,
                 std::vector<S>& out);

/// First-hit-time histogram over seeded stationary streams using direct
/// string matching (independent of the automaton machinery). hist[tau] counts
/// trials with first hit at time tau (1-based); trials that survive past
/// t_max are censored and appear in no bucket. Trial seeds derive from
/// (master_seed, trial index), so the histogram is identical for the serial
/// and parallel variants and for any thread count.
std::vector<std::uint64_t> mc_first_hit_histogram_serial(const SymbolicSystem& system,
                                                         const MeasureModel& mu,
                                                         const HoleSpec& hole, int t_max,
                                                         std::uint64_t trials,
                                                         std::uint64_t master_seed);
std::vector<std::uint64_t> mc_first_hit_histogram_parallel(const SymbolicSystem& system,
                                                           const MeasureModel& mu,
                                                           const HoleSpec& hole, int t_max,
                                                           std::uint64_t trials,
                                                           std::uint64_t master_seed);
std::vector<std::uint64_t> mc_first_hit_histogram(const SymbolicSystem& system,
                                                  const MeasureModel& mu, const HoleSpec& hole,
                                                  int t_max, std::uint64_t trials,
                                                  std::uint64_t master_seed);

}  // namespace reclab
