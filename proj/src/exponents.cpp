/**
 * @file exponents.cpp
 */
#include "miso/exponents.hpp"

#include "miso/errors.hpp"

namespace miso {

namespace {

void check_unit(const Rational& v, int t, int user, const char* name) {
  if (v < 0 || v > 1) throw RangeViolation(t, user, std::string(name) + " outside [0,1]");
}

std::vector<Rational> per_period(const PeriodicFeedbackSpec& spec, Rational* beta) {
  if (spec.Tc < 1) throw ValidationError("coherence period must be positive");
  std::vector<Rational> inc(spec.Tc, Rational(0));
  for (const auto& [slot, q] : spec.events) {
    if (slot < 1 || slot > spec.Tc)
      throw ValidationError("feedback event slot " + std::to_string(slot) + " outside [1,Tc]");
    if (q < 0) throw ValidationError("negative quality increment");
    inc[slot - 1] += q;
  }
  std::vector<Rational> alpha(spec.Tc);
  Rational acc(0);
  for (int t = 0; t < spec.Tc; ++t) {
    acc += inc[t];
    if (acc > 1) throw ValidationError("cumulative feedback quality exceeds 1");
    alpha[t] = acc;
  }
  if (spec.delayed_extra < 0) throw ValidationError("negative delayed increment");
  *beta = acc + spec.delayed_extra;
  if (*beta > 1) throw ValidationError("delayed quality exceeds 1");
  return alpha;
}

}  // namespace

ExponentProfile validate_profile(const ExponentProfile& p) {
  if (p.n < 1) throw LengthMismatch("profile needs at least one slot");
  const std::size_t n = static_cast<std::size_t>(p.n);
  if (p.alpha1.size() != n || p.alpha2.size() != n || p.beta1.size() != n ||
      p.beta2.size() != n)
    throw LengthMismatch("exponent sequences must all have length n=" + std::to_string(p.n));
  if (p.eta < 0) throw ValidationError("eta must be positive");
  for (int t = 0; t < p.n; ++t) {
    const Rational* a[2] = {&p.alpha1[t], &p.alpha2[t]};
    const Rational* b[2] = {&p.beta1[t], &p.beta2[t]};
    for (int i = 0; i < 2; ++i) {
      check_unit(*a[i], t + 1, i + 1, "alpha");
      check_unit(*b[i], t + 1, i + 1, "beta");
      if (*a[i] > *b[i]) throw RangeViolation(t + 1, i + 1, "alpha exceeds beta");
    }
  }
  return p;
}

ExponentAverages averages(const ExponentProfile& p) {
  validate_profile(p);
  return {mean(p.alpha1), mean(p.alpha2), mean(p.beta1), mean(p.beta2)};
}

void validate_averages(const ExponentAverages& a) {
  const Rational* v[4] = {&a.a1, &a.a2, &a.b1, &a.b2};
  for (int i = 0; i < 4; ++i)
    if (*v[i] < 0 || *v[i] > 1) throw ValidationError("average exponent outside [0,1]");
  if (a.a1 > a.b1 || a.a2 > a.b2) throw ValidationError("average alpha exceeds average beta");
}

std::pair<ExponentAverages, bool> label_users(const ExponentAverages& a) {
  if (a.a2 <= a.a1) return {a, false};
  return {ExponentAverages{a.a2, a.a1, a.b2, a.b1}, true};
}

ExponentProfile make_periodic_profile(const PeriodicFeedbackSpec& user1,
                                      const PeriodicFeedbackSpec& user2, int periods) {
  if (periods < 1) throw ValidationError("periods must be positive");
  if (user1.Tc != user2.Tc) throw ValidationError("per-user specs need the same Tc");
  Rational b1, b2;
  auto a1 = per_period(user1, &b1);
  auto a2 = per_period(user2, &b2);
  ExponentProfile p;
  p.n = user1.Tc * periods;
  for (int k = 0; k < periods; ++k)
    for (int t = 0; t < user1.Tc; ++t) {
      p.alpha1.push_back(a1[t]);
      p.alpha2.push_back(a2[t]);
      p.beta1.push_back(b1);
      p.beta2.push_back(b2);
    }
  return validate_profile(p);
}

ExponentProfile make_periodic_profile(const PeriodicFeedbackSpec& spec, int periods) {
  return make_periodic_profile(spec, spec, periods);
}

ExponentProfile make_mat_profile(int periods) {
  if (periods < 1) throw ValidationError("periods must be positive");
  ExponentProfile p;
  p.n = 3 * periods;
  for (int t = 1; t <= p.n; ++t) {
    p.alpha1.emplace_back(0);
    p.alpha2.emplace_back(0);
    p.beta1.emplace_back(t % 3 == 1 ? 1 : 0);
    p.beta2.emplace_back(t % 3 == 2 ? 1 : 0);
  }
  return p;
}

ExponentProfile make_constant_profile(int n, const Rational& alpha, const Rational& beta) {
  ExponentProfile p;
  p.n = n;
  p.alpha1.assign(n, alpha);
  p.alpha2.assign(n, alpha);
  p.beta1.assign(n, beta);
  p.beta2.assign(n, beta);
  return validate_profile(p);
}

ExponentAverages alternating_csit_map(const Rational& lambdaP, const Rational& lambdaD) {
  if (lambdaP < 0 || lambdaD < 0 || lambdaP + lambdaD > 1)
    throw ValidationError("state frequencies must be nonnegative with sum at most 1");
  Rational b = lambdaP + lambdaD;
  return {lambdaP, lambdaP, b, b};
}

ExponentProfile profile_window(const ExponentProfile& p, int first, int len) {
  ExponentProfile w;
  w.n = len;
  w.eta = p.eta;
  for (int k = 0; k < len; ++k) {
    int t = (first + k) % p.n;
    w.alpha1.push_back(p.alpha1[t]);
    w.alpha2.push_back(p.alpha2[t]);
    w.beta1.push_back(p.beta1[t]);
    w.beta2.push_back(p.beta2[t]);
  }
  return w;
}

}  // namespace miso
