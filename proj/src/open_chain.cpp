#include "reclab/open_chain.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace reclab {

PatternAutomaton::PatternAutomaton(const HoleSpec& hole, int alphabet_size)
    : alphabet_(alphabet_size) {
  // Trie
  struct Node {
    std::vector<int> child;
    int fail = 0;
    int depth = 0;
    bool terminal = false;
  };
  std::vector<Node> nodes(1);
  nodes[0].child.assign(static_cast<std::size_t>(alphabet_), -1);
  for (const auto& w : hole.cylinders) {
    int cur = 0;
    for (int s : w.symbols) {
      int& slot = nodes[static_cast<std::size_t>(cur)].child[static_cast<std::size_t>(s)];
      if (slot < 0) {
        slot = static_cast<int>(nodes.size());
        Node fresh;
        fresh.child.assign(static_cast<std::size_t>(alphabet_), -1);
        fresh.depth = nodes[static_cast<std::size_t>(cur)].depth + 1;
        nodes.push_back(std::move(fresh));
      }
      cur = nodes[static_cast<std::size_t>(cur)].child[static_cast<std::size_t>(s)];
    }
    nodes[static_cast<std::size_t>(cur)].terminal = true;
  }
  // Failure links + closed step function, breadth-first.
  const int n = static_cast<int>(nodes.size());
  step_.assign(static_cast<std::size_t>(n) * alphabet_, 0);
  match_lens_.assign(static_cast<std::size_t>(n), {});
  max_match_.assign(static_cast<std::size_t>(n), 0);
  std::deque<int> queue;
  for (int a = 0; a < alphabet_; ++a) {
    int c = nodes[0].child[static_cast<std::size_t>(a)];
    if (c >= 0) {
      nodes[static_cast<std::size_t>(c)].fail = 0;
      step_[static_cast<std::size_t>(a)] = c;
      queue.push_back(c);
    }
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    const Node& nu = nodes[static_cast<std::size_t>(u)];
    match_lens_[static_cast<std::size_t>(u)] = match_lens_[static_cast<std::size_t>(nu.fail)];
    if (nu.terminal) match_lens_[static_cast<std::size_t>(u)].push_back(nu.depth);
    if (!match_lens_[static_cast<std::size_t>(u)].empty())
      max_match_[static_cast<std::size_t>(u)] =
          *std::max_element(match_lens_[static_cast<std::size_t>(u)].begin(),
                            match_lens_[static_cast<std::size_t>(u)].end());
    for (int a = 0; a < alphabet_; ++a) {
      int c = nu.child[static_cast<std::size_t>(a)];
      if (c >= 0) {
        nodes[static_cast<std::size_t>(c)].fail =
            step_[static_cast<std::size_t>(nu.fail) * alphabet_ + a];
        step_[static_cast<std::size_t>(u) * alphabet_ + a] = c;
        queue.push_back(c);
      } else {
        step_[static_cast<std::size_t>(u) * alphabet_ + a] =
            step_[static_cast<std::size_t>(nu.fail) * alphabet_ + a];
      }
    }
  }
}

std::vector<std::pair<int, int>> PatternAutomaton::detections(const std::vector<int>& word) const {
  std::vector<std::pair<int, int>> out;
  int node = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    node = step(node, word[i]);
    for (int len : match_lens_[static_cast<std::size_t>(node)])
      out.emplace_back(static_cast<int>(i) + 1, len);
  }
  return out;
}

bool PatternAutomaton::matches_word(const std::vector<int>& word) const {
  int node = 0;
  for (int s : word) node = step(node, s);
  for (int len : match_lens_[static_cast<std::size_t>(node)])
    if (len == static_cast<int>(word.size())) return true;
  return false;
}

OpenChain compile_hole(const SymbolicSystem& system, const MeasureModel& mu, const HoleSpec& hole,
                       const ChainBuildOptions& options) {
  if (hole.cylinders.empty()) throw ConfigError("hole must be non-empty");
  Rat total = mu.hole_measure(hole);
  if (total >= 1) throw ConfigError("degenerate hole: it covers the whole space");

  const int a = system.alphabet_size();
  const bool track_symbol = (mu.kind() == MeasureModel::Kind::Markov);
  PatternAutomaton automaton(hole, a);

  // Reachable product states, breadth-first from the one-symbol histories.
  std::map<std::pair<int, int>, int> index;  // (automaton node, last symbol) -> state
  std::vector<std::pair<int, int>> states;
  auto intern = [&](int node, int last) {
    auto key = std::make_pair(node, track_symbol ? last : -1);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(states.size());
    if (states.size() >= options.state_cap)
      throw CapExceededError("open chain exceeds the state cap");
    index.emplace(key, id);
    states.push_back(key);
    return id;
  };

  std::map<int, Rat> init_accum;
  for (int s = 0; s < a; ++s) {
    if (mu.initial(s) == 0) continue;
    int node = automaton.step(0, s);
    if (automaton.max_match_len(node) > 0) continue;  // absorbed on the first symbol
    init_accum[intern(node, s)] += mu.initial(s);
  }

  std::vector<std::int32_t> next;
  std::vector<Rat> prob;
  std::vector<std::int16_t> det;
  for (std::size_t id = 0; id < states.size(); ++id) {
    auto [node, last] = states[id];
    next.insert(next.end(), static_cast<std::size_t>(a), -1);
    prob.insert(prob.end(), static_cast<std::size_t>(a), Rat(0));
    det.insert(det.end(), static_cast<std::size_t>(a), 0);
    for (int s = 0; s < a; ++s) {
      Rat p = track_symbol ? mu.transition(last, s) : mu.initial(s);
      if (p == 0) continue;
      int tnode = automaton.step(node, s);
      int tid = intern(tnode, s);  // may extend the scan
      std::size_t slot = id * a + s;
      next[slot] = tid;
      prob[slot] = p;
      det[slot] = static_cast<std::int16_t>(automaton.max_match_len(tnode));
    }
  }

  OpenChain chain{.alphabet = a,
                  .num_states = static_cast<int>(states.size()),
                  .max_word_len = hole.depth,
                  .next = std::move(next),
                  .prob = std::move(prob),
                  .det_len = std::move(det),
                  .init = {},
                  .hole_measure = total,
                  .automaton = std::move(automaton)};
  chain.init.assign(static_cast<std::size_t>(chain.num_states), Rat(0));
  for (const auto& [id, mass] : init_accum) chain.init[static_cast<std::size_t>(id)] = mass;
  return chain;
}

}  // namespace reclab
