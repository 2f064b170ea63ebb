#include "reclab/symbolic.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "reclab/rng.hpp"

namespace reclab {

SymbolicSystem SymbolicSystem::full_shift(int alphabet_size) {
  if (alphabet_size < 2) throw ConfigError("alphabet_size must be >= 2");
  return SymbolicSystem(alphabet_size, {});
}

SymbolicSystem SymbolicSystem::sft(int alphabet_size, std::vector<std::vector<int>> transition) {
  if (alphabet_size < 2) throw ConfigError("alphabet_size must be >= 2");
  const std::size_t a = static_cast<std::size_t>(alphabet_size);
  if (transition.size() != a) throw ConfigError("transition matrix must be alphabet_size x alphabet_size");
  std::vector<std::uint8_t> flat(a * a, 0);
  for (std::size_t i = 0; i < a; ++i) {
    if (transition[i].size() != a)
      throw ConfigError("transition matrix must be alphabet_size x alphabet_size");
    for (std::size_t j = 0; j < a; ++j) {
      if (transition[i][j] != 0 && transition[i][j] != 1)
        throw ConfigError("transition matrix entries must be 0 or 1");
      flat[i * a + j] = static_cast<std::uint8_t>(transition[i][j]);
    }
  }
  // Primitivity: some power with all entries positive, exponent <= A^2.
  std::vector<std::uint8_t> pow = flat, next(a * a);
  bool primitive = false;
  for (int e = 1; e <= alphabet_size * alphabet_size; ++e) {
    bool all = true;
    for (auto v : pow)
      if (!v) { all = false; break; }
    if (all) { primitive = true; break; }
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t k = 0; k < a; ++k)
        if (pow[i * a + k])
          for (std::size_t j = 0; j < a; ++j)
            if (flat[k * a + j]) next[i * a + j] = 1;
    pow = next;
  }
  if (!primitive)
    throw ConfigError("transition matrix is not irreducible and aperiodic");
  return SymbolicSystem(alphabet_size, std::move(flat));
}

bool SymbolicSystem::word_admissible(const std::vector<int>& symbols) const {
  for (int s : symbols)
    if (s < 0 || s >= alphabet_) return false;
  if (transition_.empty()) return true;
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
    if (!allowed(symbols[i], symbols[i + 1])) return false;
  return true;
}

std::string Word::str() const {
  std::string out;
  out.reserve(symbols.size());
  for (int s : symbols) {
    if (s < 0 || s > 9) throw ConfigError("Word::str supports alphabets up to 10 symbols");
    out.push_back(static_cast<char>('0' + s));
  }
  return out;
}

Word Word::from_string(const std::string& s) {
  std::vector<int> symbols;
  symbols.reserve(s.size());
  for (char c : s) {
    if (c < '0' || c > '9') throw ConfigError("word literal must be digits: '" + s + "'");
    symbols.push_back(c - '0');
  }
  return Word(std::move(symbols));
}

PointSpec PointSpec::periodic(std::vector<int> period, std::vector<int> preperiod) {
  if (period.empty()) throw ConfigError("period must be non-empty");
  PointSpec p;
  p.kind_ = Kind::EventuallyPeriodic;
  p.period_ = std::move(period);
  p.preperiod_ = std::move(preperiod);
  return p;
}

PointSpec PointSpec::stream(std::string generator, std::uint64_t seed) {
  if (generator != "iid-uniform" && generator != "thue-morse")
    throw ConfigError("unknown stream generator: '" + generator + "'");
  PointSpec p;
  p.kind_ = Kind::Stream;
  p.generator_ = std::move(generator);
  p.seed_ = seed;
  return p;
}

void PointSpec::validate(const SymbolicSystem& system) const {
  if (kind_ == Kind::EventuallyPeriodic) {
    std::vector<int> probe = preperiod_;
    probe.insert(probe.end(), period_.begin(), period_.end());
    probe.insert(probe.end(), period_.begin(), period_.end());
    if (!system.word_admissible(probe))
      throw ConfigError("point sequence is not admissible in the system");
  } else if (generator_ == "thue-morse") {
    if (system.alphabet_size() != 2 || !system.is_full_shift())
      throw ConfigError("thue-morse stream requires the full shift on 2 symbols");
  }
}

std::vector<int> PointSpec::prefix(int n, const SymbolicSystem& system) const {
  if (n < 0) throw ConfigError("prefix length must be >= 0");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  if (kind_ == Kind::EventuallyPeriodic) {
    for (int i = 0; i < n; ++i) {
      if (i < static_cast<int>(preperiod_.size()))
        out.push_back(preperiod_[static_cast<std::size_t>(i)]);
      else
        out.push_back(period_[static_cast<std::size_t>(i - preperiod_.size()) % period_.size()]);
    }
    return out;
  }
  if (generator_ == "thue-morse") {
    for (int i = 0; i < n; ++i)
      out.push_back(std::popcount(static_cast<std::uint64_t>(i)) & 1);
    return out;
  }
  // iid-uniform: first symbol uniform over the alphabet, afterwards uniform
  // over admissible successors.
  SplitMix64 gen(seed_);
  const int a = system.alphabet_size();
  int last = -1;
  for (int i = 0; i < n; ++i) {
    std::vector<int> choices;
    if (last < 0) {
      for (int s = 0; s < a; ++s) choices.push_back(s);
    } else {
      for (int s = 0; s < a; ++s)
        if (system.allowed(last, s)) choices.push_back(s);
    }
    last = choices[static_cast<std::size_t>(gen.uniform() * static_cast<double>(choices.size()))];
    out.push_back(last);
  }
  return out;
}

HoleSpec HoleSpec::normalized(std::vector<Word> words, const SymbolicSystem& system) {
  if (words.empty()) throw ConfigError("hole must contain at least one word");
  for (const auto& w : words) {
    if (w.length() < 1) throw ConfigError("hole words must have length >= 1");
    if (!system.word_admissible(w.symbols))
      throw ConfigError("hole word '" + w.str() + "' is not admissible");
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  // A word with a shorter member as prefix is subsumed by it.
  std::vector<Word> keep;
  for (const auto& w : words) {
    bool subsumed = false;
    for (const auto& k : keep) {
      if (k.length() <= w.length() &&
          std::equal(k.symbols.begin(), k.symbols.end(), w.symbols.begin())) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) keep.push_back(w);
  }
  HoleSpec hole;
  hole.cylinders = std::move(keep);
  for (const auto& w : hole.cylinders) hole.depth = std::max(hole.depth, w.length());
  return hole;
}

namespace {

std::uint64_t checked_power(int base, int exp, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= static_cast<std::uint64_t>(base);
    if (v > cap)
      throw CapExceededError("alphabet_size^" + std::to_string(exp) +
                             " exceeds the enumeration cap");
  }
  return v;
}

void enumerate_rec(const SymbolicSystem& system, int n, std::vector<int>& cur,
                   std::vector<Word>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.emplace_back(cur);
    return;
  }
  for (int s = 0; s < system.alphabet_size(); ++s) {
    if (!cur.empty() && !system.allowed(cur.back(), s)) continue;
    cur.push_back(s);
    enumerate_rec(system, n, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Word> enumerate_join(const SymbolicSystem& system, int n, std::uint64_t cap) {
  if (n < 1) throw ConfigError("join order must be >= 1");
  checked_power(system.alphabet_size(), n, cap);
  std::vector<Word> out;
  std::vector<int> cur;
  enumerate_rec(system, n, cur, out);
  return out;  // recursion emits in lexicographic order
}

Word cylinder_around(const PointSpec& z, int n, const SymbolicSystem& system) {
  if (n < 1) throw ConfigError("cylinder depth must be >= 1");
  return Word(z.prefix(n, system));
}

PrimePeriodResult prime_period(const PointSpec& z, int bound, const SymbolicSystem& system) {
  if (bound < 1) throw ConfigError("period bound must be >= 1");
  PrimePeriodResult res;
  if (z.kind() != PointSpec::Kind::EventuallyPeriodic || !z.preperiod().empty()) {
    res.status = PrimePeriodResult::Status::NotApplicable;
    return res;
  }
  const int len = static_cast<int>(z.period().size());
  // z is len-periodic, so shift^p(z) = z reduces to agreement on one period.
  std::vector<int> window = z.prefix(bound + len, system);
  for (int p = 1; p <= bound; ++p) {
    bool match = true;
    for (int i = 0; i < len; ++i) {
      if (window[static_cast<std::size_t>(i)] != window[static_cast<std::size_t>(i + p)]) {
        match = false;
        break;
      }
    }
    if (match) {
      res.status = PrimePeriodResult::Status::Found;
      res.period = p;
      return res;
    }
  }
  res.status = PrimePeriodResult::Status::NoneWithinBound;
  return res;
}

Word intersected_cylinder(const PointSpec& z, int n, int p, int u, const SymbolicSystem& system) {
  if (n < 1 || p < 1 || u < 0) throw ConfigError("invalid intersected_cylinder parameters");
  auto pp = prime_period(z, p, system);
  if (pp.status != PrimePeriodResult::Status::Found || p % *pp.period != 0)
    throw ConfigError("point is not p-periodic with p = " + std::to_string(p));
  return Word(z.prefix(n + u * p, system));
}

std::vector<Word> outer_j_approximation(const HoleSpec& hole, int j, Side side,
                                        const SymbolicSystem& system, std::uint64_t cap) {
  const int n = hole.depth;
  if (j < 1 || j > n) throw ConfigError("approximation depth j out of range");
  // Expand every hole word to its admissible depth-n extensions, then read
  // off prefixes (right) or suffixes (left) of length j.
  std::set<Word> out;
  std::uint64_t budget = cap;
  for (const auto& w : hole.cylinders) {
    std::vector<std::vector<int>> stack = {w.symbols};
    while (!stack.empty()) {
      std::vector<int> cur = std::move(stack.back());
      stack.pop_back();
      if (static_cast<int>(cur.size()) == n) {
        if (budget-- == 0) throw CapExceededError("outer approximation expansion exceeds cap");
        std::vector<int> piece;
        if (side == Side::Right)
          piece.assign(cur.begin(), cur.begin() + j);
        else
          piece.assign(cur.end() - j, cur.end());
        out.insert(Word(std::move(piece)));
        continue;
      }
      for (int s = 0; s < system.alphabet_size(); ++s) {
        if (!system.allowed(cur.back(), s)) continue;
        auto ext = cur;
        ext.push_back(s);
        stack.push_back(std::move(ext));
      }
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace reclab
