/**
 * @file rational.cpp
 */
#include "miso/rational.hpp"

#include <algorithm>
#include <cmath>

#include "miso/errors.hpp"

namespace miso {

namespace {

// Decimal integer with optional sign. cpp_int alone would read "010" as octal.
boost::multiprecision::cpp_int parse_integer(const std::string& s, const std::string& text) {
  std::size_t k = s.empty() || (s[0] != '-' && s[0] != '+') ? 0 : 1;
  if (k == s.size()) throw ValidationError("bad number '" + text + "'");
  for (std::size_t i = k; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw ValidationError("bad number '" + text + "'");
  std::string d = s.substr(k);
  d.erase(0, std::min(d.find_first_not_of('0'), d.size() - 1));
  boost::multiprecision::cpp_int v(d);
  return s[0] == '-' ? -v : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ValidationError("empty rational");
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Rational num{parse_integer(s.substr(0, slash), text)};
      Rational den{parse_integer(s.substr(slash + 1), text)};
      if (den == 0) throw ValidationError("zero denominator in '" + text + "'");
      return num / den;
    }
    auto dot = s.find_first_of(".eE");
    if (dot == std::string::npos) return Rational{parse_integer(s, text)};
    // Decimal literal: exact value of the written digits, not of the double.
    auto epos = s.find_first_of("eE");
    std::string mant = s.substr(0, epos);
    long exp10 = epos == std::string::npos ? 0 : std::stol(s.substr(epos + 1));
    bool neg = !mant.empty() && mant[0] == '-';
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) mant = mant.substr(1);
    auto p = mant.find('.');
    std::string digits = mant;
    if (p != std::string::npos) {
      digits = mant.substr(0, p) + mant.substr(p + 1);
      exp10 -= static_cast<long>(mant.size() - p - 1);
    }
    Rational r{parse_integer(digits, text)};
    Rational ten(10);
    for (long i = 0; i < std::labs(exp10); ++i) r = exp10 > 0 ? r * ten : r / ten;
    return neg ? -r : r;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("bad rational '" + text + "'");
  }
}

Rational rational_from_double(double x, long long max_den) {
  if (!std::isfinite(x)) throw ValidationError("non-finite exponent");
  bool neg = x < 0;
  double v = std::fabs(x);
  // Convergents h/k of the continued fraction expansion.
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rem = v;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(rem);
    long long ai = static_cast<long long>(a);
    long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    double frac = rem - a;
    if (frac < 1e-15 || std::fabs(static_cast<double>(h1) / k1 - v) < 1e-15) break;
    rem = 1.0 / frac;
  }
  if (k1 == 0) return Rational(0);
  Rational r(h1);
  r /= k1;
  return neg ? -r : r;
}

std::string to_string(const Rational& r) { return r.str(); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational mean(const std::vector<Rational>& v) {
  if (v.empty()) throw ValidationError("mean of empty sequence");
  Rational s(0);
  for (const auto& x : v) s += x;
  return s / static_cast<long long>(v.size());
}

}  // namespace miso
