#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "reclab/errors.hpp"

namespace reclab {

// Exact arithmetic backbone. All measure parameters are stored as rationals;
// the float engine converts once at chain-compile time.
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_pow(Rat base, std::uint64_t e) {
  Rat acc = 1;
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Parses "3/10", "0.3", "-1.25e-2", "7". Decimal text converts exactly
// (digits over a power of ten), so "0.3" means 3/10, not the nearest double.
Rat parse_rational(const std::string& text);

// Decimal rendering of a double that round-trips; used for config echo and CSV.
std::string double_repr(double x);

// Converts a double to the rational its shortest decimal representation
// denotes. Lets JSON configs write 0.3 and still mean 3/10 in exact mode.
Rat rational_from_double_text(double x);

std::string rat_string(const Rat& r);  // "num/den" (or "num" when den==1)

}  // namespace reclab
