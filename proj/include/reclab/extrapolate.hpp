#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "reclab/errors.hpp"

namespace reclab {

struct Extrapolation {
  double limit = 0.0;
  double lo = 0.0, hi = 0.0;  // bracket from the last three (possibly accelerated) values
  bool converged = false;
  bool accelerated = false;
};

/// Aitken delta-squared acceleration, gated on a stable contracting increment
/// ratio; otherwise the last raw value. Bracket is the min/max of the last
/// three values of whichever sequence was used.
inline Extrapolation extrapolate_limit(const std::vector<double>& values, double tol = 1e-3) {
  if (values.size() < 4) throw ConfigError("extrapolation needs at least 4 points");
  const std::size_t m = values.size();
  Extrapolation out;

  std::vector<double> diffs(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) diffs[i] = values[i + 1] - values[i];

  double scale = 0.0;
  for (std::size_t i = m - 3; i < m; ++i) scale = std::max(scale, std::abs(values[i]));
  scale = std::max(scale, 1.0);

  // Effectively constant tail: nothing to accelerate.
  bool flat = true;
  for (std::size_t i = m - 3; i < m - 1; ++i)
    if (std::abs(diffs[i]) > 1e-14 * scale) flat = false;
  if (flat) {
    out.limit = values[m - 1];
    out.lo = std::min({values[m - 3], values[m - 2], values[m - 1]});
    out.hi = std::max({values[m - 3], values[m - 2], values[m - 1]});
    out.converged = (out.hi - out.lo) <= tol;
    return out;
  }

  std::vector<double> ratios;
  const std::size_t want = std::min<std::size_t>(3, m - 2);
  for (std::size_t i = m - 2 - want; i <= m - 3; ++i) {
    if (diffs[i] == 0.0) { ratios.clear(); break; }
    ratios.push_back(diffs[i + 1] / diffs[i]);
  }
  bool stable = !ratios.empty();
  for (double r : ratios)
    if (std::abs(r) >= 0.95) stable = false;
  if (stable && ratios.size() >= 2) {
    double mn = *std::min_element(ratios.begin(), ratios.end());
    double mx = *std::max_element(ratios.begin(), ratios.end());
    if (mx - mn >= 0.2) stable = false;
  }

  if (stable) {
    // Accelerated value for the windows ending at the last three points.
    std::vector<double> acc;
    for (std::size_t end = m - 3; end < m; ++end) {
      if (end < 2) continue;
      double d1 = values[end - 1] - values[end - 2];
      double d2 = values[end] - values[end - 1];
      double denom = d2 - d1;
      if (std::abs(denom) < 1e-300) {
        acc.push_back(values[end]);
      } else {
        acc.push_back(values[end] - d2 * d2 / denom);
      }
    }
    if (acc.size() >= 2) {
      out.accelerated = true;
      out.limit = acc.back();
      out.lo = *std::min_element(acc.begin(), acc.end());
      out.hi = *std::max_element(acc.begin(), acc.end());
      out.converged = (out.hi - out.lo) <= tol;
      return out;
    }
  }

  out.limit = values[m - 1];
  out.lo = std::min({values[m - 3], values[m - 2], values[m - 1]});
  out.hi = std::max({values[m - 3], values[m - 2], values[m - 1]});
  out.converged = (out.hi - out.lo) <= tol;
  return out;
}

}  // namespace reclab
