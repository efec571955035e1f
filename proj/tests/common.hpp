/**
 * @file common.hpp
 * @brief Small helpers shared by the unit tests.
 */
#pragma once

#include <random>

#include "doctest.h"
#include "miso/rational.hpp"

namespace miso::test {

inline Rational R(long p, long q = 1) { return Rational(p) / q; }

/// Uniform random rational k/den with k in [lo*den, hi*den].
inline Rational rand_rat(std::mt19937_64& rng, const Rational& lo, const Rational& hi, long den) {
  const long a = static_cast<long>(ceil(to_double(lo * den) - 1e-12));
  const long b = static_cast<long>(floor(to_double(hi * den) + 1e-12));
  if (b <= a) return lo;
  std::uniform_int_distribution<long> d(a, b);
  Rational r = R(d(rng), den);
  if (r < lo) r = lo;
  if (r > hi) r = hi;
  return r;
}

}  // namespace miso::test
