/**
 * @file rational.hpp
 * @brief Exact rational numbers used by the planner.
 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace miso {

using Rational = boost::multiprecision::number<
    boost::multiprecision::cpp_rational_backend,
    boost::multiprecision::et_off>;

/// Parses "p/q", an integer, or a decimal literal such as "0.25".
Rational parse_rational(const std::string& text);

/// Closest rational with denominator at most max_den (continued fractions).
Rational rational_from_double(double x, long long max_den = 1000000);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

inline Rational pos(const Rational& r) { return r > 0 ? r : Rational(0); }
inline Rational rmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational mean(const std::vector<Rational>& v);

}  // namespace miso
