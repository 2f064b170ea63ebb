#include "reclab/rational.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace reclab {

namespace {

Rat parse_decimal(const std::string& s) {
  // [sign] digits [. digits] [ (e|E) [sign] digits ]
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');
  BigInt mantissa = 0;
  long frac_digits = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (dot) ++frac_digits;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw ConfigError("invalid rational literal: '" + s + "'");
  long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = (s[i++] == '-');
    if (i >= s.size()) throw ConfigError("invalid exponent in '" + s + "'");
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        throw ConfigError("invalid exponent in '" + s + "'");
      exp10 = exp10 * 10 + (s[i] - '0');
    }
    if (eneg) exp10 = -exp10;
  }
  if (i != s.size()) throw ConfigError("invalid rational literal: '" + s + "'");
  long net = exp10 - frac_digits;
  BigInt num = mantissa, den = 1;
  if (net >= 0) {
    for (long k = 0; k < net; ++k) num *= 10;
  } else {
    for (long k = 0; k < -net; ++k) den *= 10;
  }
  if (neg) num = -num;
  return Rat(num, den);
}

}  // namespace

Rat parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  Rat num = parse_decimal(text.substr(0, slash));
  Rat den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw ConfigError("zero denominator in '" + text + "'");
  return num / den;
}

std::string double_repr(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

Rat rational_from_double_text(double x) { return parse_rational(double_repr(x)); }

std::string rat_string(const Rat& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace reclab
