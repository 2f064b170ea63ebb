#pragma once

#include <cstdint>

namespace reclab {

// splitmix64. Every stochastic path in the project draws from this generator
// so that results are bit-identical across platforms and thread counts.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Per-trial seed derivation; independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 g(master ^ (0x632be59bd9b4e019ULL * (index + 1)));
  return g.next();
}

}  // namespace reclab
