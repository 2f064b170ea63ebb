#include "reclab/measure.hpp"

#include <algorithm>
#include <cmath>

namespace reclab {

namespace {

constexpr double kValidationTol = 1e-12;

std::vector<Rat> solve_stationary(const std::vector<std::vector<Rat>>& P) {
  // pi P = pi, sum pi = 1: Gaussian elimination over rationals on
  // (P^T - I) pi = 0 with the normalization row appended.
  const int a = static_cast<int>(P.size());
  std::vector<std::vector<Rat>> m(static_cast<std::size_t>(a),
                                  std::vector<Rat>(static_cast<std::size_t>(a) + 1, Rat(0)));
  for (int r = 0; r < a - 1; ++r) {
    for (int c = 0; c < a; ++c) {
      m[r][c] = P[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
      if (r == c) m[r][c] -= 1;
    }
  }
  for (int c = 0; c < a; ++c) m[static_cast<std::size_t>(a) - 1][c] = 1;
  m[static_cast<std::size_t>(a) - 1][static_cast<std::size_t>(a)] = 1;

  for (int col = 0, row = 0; col <= a && row < a; ++col) {
    int pivot = -1;
    for (int r = row; r < a; ++r)
      if (m[r][col] != 0) { pivot = r; break; }
    if (pivot < 0) continue;
    std::swap(m[static_cast<std::size_t>(row)], m[static_cast<std::size_t>(pivot)]);
    Rat inv = m[row][col];
    for (int c = col; c <= a; ++c) m[row][c] /= inv;
    for (int r = 0; r < a; ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rat f = m[r][col];
      for (int c = col; c <= a; ++c) m[r][c] -= f * m[row][c];
    }
    ++row;
  }
  std::vector<Rat> pi(static_cast<std::size_t>(a));
  for (int r = 0; r < a; ++r) pi[static_cast<std::size_t>(r)] = m[r][static_cast<std::size_t>(a)];
  return pi;
}

}  // namespace

MeasureModel MeasureModel::bernoulli(std::vector<Rat> probs) {
  if (probs.size() < 2) throw ConfigError("bernoulli needs at least 2 probabilities");
  Rat sum = 0;
  for (const auto& p : probs) {
    if (p <= 0) throw ConfigError("bernoulli probabilities must be > 0");
    sum += p;
  }
  if (rat_abs(sum - 1) > Rat(1, 1000000000000ll))
    throw ConfigError("bernoulli probabilities must sum to 1");
  MeasureModel m;
  m.kind_ = Kind::Bernoulli;
  m.alphabet_ = static_cast<int>(probs.size());
  m.pi_ = std::move(probs);
  m.P_.resize(static_cast<std::size_t>(m.alphabet_) * m.alphabet_);
  for (int i = 0; i < m.alphabet_; ++i)
    for (int j = 0; j < m.alphabet_; ++j)
      m.P_[static_cast<std::size_t>(i) * m.alphabet_ + j] = m.pi_[static_cast<std::size_t>(j)];
  return m;
}

MeasureModel MeasureModel::markov(const SymbolicSystem& system, std::vector<std::vector<Rat>> P,
                                  std::vector<Rat> pi) {
  const int a = system.alphabet_size();
  if (static_cast<int>(P.size()) != a) throw ConfigError("transition matrix size mismatch");
  for (int i = 0; i < a; ++i) {
    if (static_cast<int>(P[static_cast<std::size_t>(i)].size()) != a)
      throw ConfigError("transition matrix size mismatch");
    Rat row = 0;
    for (int j = 0; j < a; ++j) {
      const Rat& p = P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (p < 0) throw ConfigError("transition probabilities must be >= 0");
      if ((p > 0) != system.allowed(i, j))
        throw ConfigError("P must be supported exactly on the admissible transitions");
      row += p;
    }
    if (rat_abs(row - 1) > Rat(1, 1000000000000ll))
      throw ConfigError("transition matrix rows must sum to 1");
  }
  if (pi.empty()) pi = solve_stationary(P);
  if (static_cast<int>(pi.size()) != a) throw ConfigError("stationary vector size mismatch");
  Rat sum = 0;
  for (const auto& p : pi) {
    if (p <= 0) throw ConfigError("stationary vector entries must be > 0");
    sum += p;
  }
  if (rat_abs(sum - 1) > Rat(1, 1000000000000ll))
    throw ConfigError("stationary vector must sum to 1");
  for (int j = 0; j < a; ++j) {
    Rat balance = 0;
    for (int i = 0; i < a; ++i)
      balance += pi[static_cast<std::size_t>(i)] * P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    if (rat_abs(balance - pi[static_cast<std::size_t>(j)]) > Rat(1, 1000000000000ll))
      throw ConfigError("pi is not stationary for P");
  }
  auto m = markov_unchecked(std::move(P), std::move(pi));
  return m;
}

MeasureModel MeasureModel::markov_unchecked(std::vector<std::vector<Rat>> P, std::vector<Rat> pi) {
  MeasureModel m;
  m.kind_ = Kind::Markov;
  m.alphabet_ = static_cast<int>(P.size());
  m.pi_ = std::move(pi);
  m.P_.resize(static_cast<std::size_t>(m.alphabet_) * m.alphabet_);
  for (int i = 0; i < m.alphabet_; ++i)
    for (int j = 0; j < m.alphabet_; ++j)
      m.P_[static_cast<std::size_t>(i) * m.alphabet_ + j] =
          P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Rat MeasureModel::cylinder(const Word& word) const {
  if (word.length() < 1) throw ConfigError("cylinder measure of the empty word");
  Rat out = initial(word.symbols[0]);
  for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
    const Rat& step = transition(word.symbols[i], word.symbols[i + 1]);
    if (step == 0) throw ConfigError("word '" + word.str() + "' is not admissible for the measure");
    out *= step;
  }
  return out;
}

Rat MeasureModel::hole_measure(const HoleSpec& hole) const {
  Rat out = 0;
  for (const auto& w : hole.cylinders) out += cylinder(w);
  return out;
}

Rat MeasureModel::constrained_measure(const std::map<int, int>& constraints) const {
  if (constraints.empty()) return Rat(1);
  Rat out = 0;
  bool first = true;
  int prev_pos = 0, prev_sym = 0;
  for (auto [pos, sym] : constraints) {
    if (first) {
      out = initial(sym);
      first = false;
    } else {
      int gap = pos - prev_pos;
      if (gap == 1) {
        out *= transition(prev_sym, sym);
      } else {
        auto pk = transition_power(gap);
        out *= pk[static_cast<std::size_t>(prev_sym) * alphabet_ + sym];
      }
      if (out == 0) return out;
    }
    prev_pos = pos;
    prev_sym = sym;
  }
  return out;
}

std::vector<Rat> MeasureModel::transition_power(int k) const {
  const std::size_t a = static_cast<std::size_t>(alphabet_);
  std::vector<Rat> result(a * a, Rat(0));
  for (std::size_t i = 0; i < a; ++i) result[i * a + i] = 1;
  std::vector<Rat> base = P_;
  int e = k;
  while (e > 0) {
    auto mul = [&](const std::vector<Rat>& x, const std::vector<Rat>& y) {
      std::vector<Rat> z(a * a, Rat(0));
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t l = 0; l < a; ++l) {
          if (x[i * a + l] == 0) continue;
          for (std::size_t j = 0; j < a; ++j) z[i * a + j] += x[i * a + l] * y[l * a + j];
        }
      return z;
    };
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return result;
}

std::vector<Rat> MeasureModel::reversed_transition() const {
  const std::size_t a = static_cast<std::size_t>(alphabet_);
  std::vector<Rat> rev(a * a);
  for (std::size_t b = 0; b < a; ++b)
    for (std::size_t c = 0; c < a; ++c)
      rev[b * a + c] = pi_[c] * P_[c * a + b] / pi_[b];
  return rev;
}

StationarityReport stationarity_check(const MeasureModel& mu, const SymbolicSystem& system, int n,
                                      std::uint64_t cap) {
  auto words = enumerate_join(system, n, cap);
  StationarityReport rep;
  rep.max_defect = 0;
  for (const auto& w : words) {
    Rat target = mu.cylinder(w);
    Rat sum = 0;
    for (int a = 0; a < system.alphabet_size(); ++a) {
      if (!system.allowed(a, w.symbols[0])) continue;
      if (mu.transition(a, w.symbols[0]) == 0) continue;
      Word ext;
      ext.symbols.push_back(a);
      ext.symbols.insert(ext.symbols.end(), w.symbols.begin(), w.symbols.end());
      sum += mu.cylinder(ext);
    }
    rep.max_defect = std::max(rep.max_defect, rat_abs(sum - target));
  }
  rep.pass = rep.max_defect <= Rat(1, 1000000000000ll);
  return rep;
}

namespace {

Rat half_l1_rows_vs(const std::vector<Rat>& M, const std::vector<Rat>& pi, int a) {
  Rat best = 0;
  for (int i = 0; i < a; ++i) {
    Rat sum = 0;
    for (int j = 0; j < a; ++j)
      sum += rat_abs(M[static_cast<std::size_t>(i) * a + j] - pi[static_cast<std::size_t>(j)]);
    best = std::max(best, sum);
  }
  return best / 2;
}

std::vector<Rat> matrix_power_of(const std::vector<Rat>& base, int a, int k) {
  const std::size_t n = static_cast<std::size_t>(a);
  std::vector<Rat> result(n * n, Rat(0));
  for (std::size_t i = 0; i < n; ++i) result[i * n + i] = 1;
  std::vector<Rat> b = base;
  int e = k;
  auto mul = [&](const std::vector<Rat>& x, const std::vector<Rat>& y) {
    std::vector<Rat> z(n * n, Rat(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        if (x[i * n + l] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) z[i * n + j] += x[i * n + l] * y[l * n + j];
      }
    return z;
  };
  while (e > 0) {
    if (e & 1) result = mul(result, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return result;
}

}  // namespace

Rat phi_coefficient_exact(const MeasureModel& mu, int k, Side side) {
  if (k < 1) throw ConfigError("phi coefficient requires k >= 1");
  if (mu.kind() == MeasureModel::Kind::Bernoulli) return Rat(0);
  const int a = mu.alphabet_size();
  std::vector<Rat> pi(static_cast<std::size_t>(a));
  for (int i = 0; i < a; ++i) pi[static_cast<std::size_t>(i)] = mu.initial(i);
  if (side == Side::Left) return half_l1_rows_vs(mu.transition_power(k), pi, a);
  return half_l1_rows_vs(matrix_power_of(mu.reversed_transition(), a, k), pi, a);
}

Rat phi_coefficient_bruteforce(const MeasureModel& mu, const SymbolicSystem& system, int k,
                               Side side, int depth_cap) {
  if (k < 1 || depth_cap < 1) throw ConfigError("invalid phi brute-force parameters");
  std::uint64_t total = 1;
  for (int i = 0; i < depth_cap; ++i) {
    total *= static_cast<std::uint64_t>(system.alphabet_size());
    if (total > (1ull << 22)) throw CapExceededError("phi brute-force depth cap too large");
  }
  const int a = system.alphabet_size();
  auto pk = mu.transition_power(k);
  Rat best = 0;
  if (side == Side::Left) {
    // Ratio to mu(A): per conditioning word w, the optimal union B collects
    // the positive-part contributions over one join depth d.
    for (int n = 1; n <= depth_cap; ++n) {
      for (const auto& w : enumerate_join(system, n)) {
        const int end_sym = w.symbols.back();
        for (int d = 1; d <= depth_cap; ++d) {
          Rat pos_sum = 0;
          for (const auto& v : enumerate_join(system, d)) {
            const int v0 = v.symbols[0];
            Rat tail = 1;  // mu(v) / mu.initial(v0)
            for (std::size_t i = 0; i + 1 < v.symbols.size(); ++i)
              tail *= mu.transition(v.symbols[i], v.symbols[i + 1]);
            Rat diff = (pk[static_cast<std::size_t>(end_sym) * a + v0] - mu.initial(v0)) * tail;
            if (diff > 0) pos_sum += diff;
          }
          best = std::max(best, pos_sum);
        }
      }
    }
    return best;
  }
  // Ratio to mu(B): per target word v, the optimal union A collects the
  // positive-part contributions over conditioning words w.
  for (int d = 1; d <= depth_cap; ++d) {
    for (const auto& v : enumerate_join(system, d)) {
      const int v0 = v.symbols[0];
      for (int n = 1; n <= depth_cap; ++n) {
        Rat pos_sum = 0;
        for (const auto& w : enumerate_join(system, n)) {
          Rat diff = mu.cylinder(w) *
                     (pk[static_cast<std::size_t>(w.symbols.back()) * a + v0] - mu.initial(v0));
          if (diff > 0) pos_sum += diff;
        }
        best = std::max(best, Rat(pos_sum / mu.initial(v0)));
      }
    }
  }
  return best;
}

DecayFit classify_decay(const std::vector<double>& values, double residual_threshold) {
  if (values.size() < 8) throw ConfigError("classify_decay needs at least 8 values");
  DecayFit fit;
  const std::size_t start = values.size() / 2;
  bool all_zero = true;
  for (std::size_t i = start; i < values.size(); ++i)
    if (values[i] > 0) all_zero = false;
  if (all_zero) {
    fit.kind = DecayFit::Kind::Exponential;
    fit.rate = 0.0;
    return fit;
  }
  std::vector<double> xs_exp, xs_poly, ys;
  for (std::size_t i = start; i < values.size(); ++i) {
    if (values[i] <= 0) continue;  // zeros in the tail cannot enter a log fit
    double kk = static_cast<double>(i + 1);
    xs_exp.push_back(kk);
    xs_poly.push_back(std::log(kk));
    ys.push_back(std::log(values[i]));
  }
  if (ys.size() < 3) {
    fit.kind = DecayFit::Kind::Undetermined;
    return fit;
  }
  auto least_squares = [&](const std::vector<double>& xs) {
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double inter = (sy - slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - (inter + slope * xs[i]);
      ss += r * r;
    }
    return std::pair<double, double>(slope, std::sqrt(ss / n));
  };
  auto [slope_exp, resid_exp] = least_squares(xs_exp);
  auto [slope_poly, resid_poly] = least_squares(xs_poly);
  fit.residual_exp = resid_exp;
  fit.residual_poly = resid_poly;
  if (resid_exp > residual_threshold && resid_poly > residual_threshold) {
    fit.kind = DecayFit::Kind::Undetermined;
    return fit;
  }
  if (resid_exp <= resid_poly) {
    fit.kind = DecayFit::Kind::Exponential;
    fit.rate = std::exp(slope_exp);
  } else {
    fit.kind = DecayFit::Kind::Polynomial;
    fit.power = -slope_poly;
  }
  return fit;
}

PhiProfile build_phi_profile(const MeasureModel& mu, int k_max, Side side,
                             double residual_threshold) {
  if (k_max < 1) throw ConfigError("phi profile needs k_max >= 1");
  PhiProfile prof;
  prof.side = side;
  prof.values.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k)
    prof.values.push_back(to_double(phi_coefficient_exact(mu, k, side)));
  prof.envelope = prof.values;
  for (int i = k_max - 2; i >= 0; --i)
    prof.envelope[static_cast<std::size_t>(i)] =
        std::max(prof.envelope[static_cast<std::size_t>(i)],
                 prof.envelope[static_cast<std::size_t>(i) + 1]);
  if (k_max >= 8) prof.fit = classify_decay(prof.envelope, residual_threshold);
  return prof;
}

}  // namespace reclab
