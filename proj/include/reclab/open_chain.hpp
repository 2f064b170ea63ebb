#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "reclab/measure.hpp"
#include "reclab/rational.hpp"
#include "reclab/symbolic.hpp"

namespace reclab {

inline constexpr std::size_t kDefaultStateCap = 200000;

/// Multi-pattern matcher over the hole's words (failure-link construction).
/// Exposes the raw detection stream so tests can cross-check it against
/// direct string matching.
class PatternAutomaton {
 public:
  PatternAutomaton(const HoleSpec& hole, int alphabet_size);

  int num_nodes() const { return static_cast<int>(step_.size()) / alphabet_; }
  int step(int node, int symbol) const {
    return step_[static_cast<std::size_t>(node) * alphabet_ + symbol];
  }
  /// Longest pattern ending at `node` (0 if none).
  int max_match_len(int node) const { return max_match_[static_cast<std::size_t>(node)]; }

  /// (end_position, pattern_length) pairs for every occurrence in `word`,
  /// positions 1-based.
  std::vector<std::pair<int, int>> detections(const std::vector<int>& word) const;
  /// Whether the word itself is one of the patterns.
  bool matches_word(const std::vector<int>& word) const;

 private:
  int alphabet_;
  std::vector<int> step_;       // node*A + symbol
  std::vector<int> max_match_;  // per node
  std::vector<std::vector<int>> match_lens_;
};

/// Absorbing product chain for a hole: pattern-automaton state crossed with
/// the last symbol read (the symbol component is dropped for Bernoulli
/// measures, whose transitions do not depend on it). Transition weights are
/// exact rationals; `det_len` carries the longest pattern completed by the
/// transition so survival evaluation can distinguish occurrence start times
/// for mixed-length holes.
struct OpenChain {
  int alphabet = 0;
  int num_states = 0;
  int max_word_len = 0;

  std::vector<std::int32_t> next;  // state*A + symbol, -1 if no transition
  std::vector<Rat> prob;           // state*A + symbol
  std::vector<std::int16_t> det_len;

  std::vector<Rat> init;  // law of the state after reading z_1, kills applied
  Rat hole_measure;

  PatternAutomaton automaton;
};

struct ChainBuildOptions {
  std::size_t state_cap = kDefaultStateCap;
};

OpenChain compile_hole(const SymbolicSystem& system, const MeasureModel& mu, const HoleSpec& hole,
                       const ChainBuildOptions& options = {});

}  // namespace reclab
