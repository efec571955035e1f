/**
 * @file allocation.cpp
 */
#include "miso/allocation.hpp"

#include <stdexcept>

#include "miso/errors.hpp"

namespace miso {

namespace {

// delta_t = alpha_t while the budget T*target lasts, then the remainder, then 0.
std::vector<Rational> fill_below_alpha(const std::vector<Rational>& alpha, const Rational& target) {
  const Rational budget = target * static_cast<long long>(alpha.size());
  Rational used(0);
  std::vector<Rational> delta;
  delta.reserve(alpha.size());
  for (const auto& a : alpha) {
    Rational d = a <= budget - used ? a : budget - used;
    used += d;
    delta.push_back(d);
  }
  return delta;
}

void check_sequence(const std::vector<Rational>& v, const char* name) {
  for (const auto& x : v)
    if (x < 0 || x > 1) throw ValidationError(std::string(name) + " exponent outside [0,1]");
}

}  // namespace

Rational delta_bar_bound(const ExponentAverages& a) {
  return rmin(rmin(a.b1, a.b2), imperfect_delayed_threshold(a));
}

void verify_delta_sequence(const std::vector<Rational>& alpha, const std::vector<Rational>& beta,
                           const Rational& delta_bar, const std::vector<Rational>& delta) {
  if (delta.size() != alpha.size()) throw std::logic_error("delta length mismatch");
  Rational excess(0);
  for (std::size_t t = 0; t < delta.size(); ++t) {
    if (delta[t] > beta[t] || delta[t] < 0)
      throw std::logic_error("power exponent violates 0 <= delta_t <= beta_t");
    excess += pos(delta[t] - alpha[t]);
  }
  const auto T = static_cast<long long>(delta.size());
  if (mean(delta) != delta_bar) throw std::logic_error("power exponents miss the phase mean");
  if (excess / T != pos(delta_bar - mean(alpha)))
    throw std::logic_error("power exponents miss the excess-over-alpha mean");
}

std::vector<Rational> solve_delta_sequence(const std::vector<Rational>& alpha,
                                           const std::vector<Rational>& beta,
                                           const Rational& delta_bar) {
  if (alpha.empty()) throw ValidationError("phase length must be positive");
  if (alpha.size() != beta.size()) throw LengthMismatch("alpha and beta lengths differ");
  check_sequence(alpha, "alpha");
  check_sequence(beta, "beta");
  for (std::size_t t = 0; t < alpha.size(); ++t)
    if (alpha[t] > beta[t]) throw RangeViolation(static_cast<int>(t) + 1, 0, "alpha exceeds beta");
  if (delta_bar < 0) throw ValidationError("delta_bar must be nonnegative");
  if (delta_bar > mean(beta))
    throw Infeasible("delta_bar " + to_string(delta_bar) + " exceeds mean beta " +
                     to_string(mean(beta)));

  const Rational abar = mean(alpha);
  std::vector<Rational> delta;
  if (delta_bar >= abar) {
    // Raise slots toward beta_t until the excess T*(delta_bar - abar) is spent.
    const Rational target = (delta_bar - abar) * static_cast<long long>(alpha.size());
    Rational spent(0);
    for (std::size_t t = 0; t < alpha.size(); ++t) {
      Rational cand = target - spent + alpha[t];
      Rational d = beta[t] <= cand ? beta[t] : cand;
      spent += d - alpha[t];
      delta.push_back(d);
    }
  } else {
    delta = fill_below_alpha(alpha, delta_bar);
  }
  verify_delta_sequence(alpha, beta, delta_bar, delta);
  return delta;
}

std::vector<Rational> solve_last_phase(const std::vector<Rational>& alpha1,
                                       const Rational& target_mean) {
  if (alpha1.empty()) throw ValidationError("phase length must be positive");
  check_sequence(alpha1, "alpha");
  if (target_mean < 0) throw ValidationError("target mean must be nonnegative");
  if (target_mean > mean(alpha1))
    throw Infeasible("last-phase target " + to_string(target_mean) + " exceeds mean alpha");
  auto delta = fill_below_alpha(alpha1, target_mean);
  for (std::size_t t = 0; t < delta.size(); ++t)
    if (delta[t] > alpha1[t] || delta[t] < 0) throw std::logic_error("last-phase exponent bound");
  if (mean(delta) != target_mean) throw std::logic_error("last-phase mean mismatch");
  return delta;
}

PhaseBudget phase_budget(const ExponentAverages& a, const Rational& delta_bar,
                         const Rational& omega) {
  validate_averages(a);
  if (omega < 0 || omega > 1) throw ValidationError("omega outside [0,1]");
  if (delta_bar < 0) throw ValidationError("delta_bar must be nonnegative");
  if (delta_bar > delta_bar_bound(a))
    throw DeltaBarTooLarge("delta_bar " + to_string(delta_bar) + " exceeds bound " +
                           to_string(delta_bar_bound(a)));
  PhaseBudget b;
  b.private1 = delta_bar + pos(delta_bar - a.a2);
  b.private2 = delta_bar + pos(delta_bar - a.a1);
  b.common = 1 - delta_bar;
  b.quantized = pos(delta_bar - a.a1) + pos(delta_bar - a.a2);
  b.delta_com = b.common - b.quantized;
  b.omega = omega;
  if (b.delta_com < 0) throw DeltaBarTooLarge("quantized interference exceeds common load");
  return b;
}

DofPoint dof_from_params(const ExponentAverages& a, const Rational& delta_bar,
                         const Rational& omega) {
  PhaseBudget b = phase_budget(a, delta_bar, omega);
  return {b.private1 + omega * b.delta_com, b.private2 + (1 - omega) * b.delta_com};
}

AllocationPlan make_plan(const ExponentProfile& phase, const Rational& delta_bar) {
  validate_profile(phase);
  AllocationPlan plan;
  plan.T = phase.n;
  plan.delta_bar = delta_bar;
  plan.delta1 = solve_delta_sequence(phase.alpha1, phase.beta1, delta_bar);
  plan.delta2 = solve_delta_sequence(phase.alpha2, phase.beta2, delta_bar);
  for (int t = 0; t < plan.T; ++t)
    plan.rates.push_back({plan.delta2[t], pos(plan.delta2[t] - phase.alpha2[t]), plan.delta1[t],
                          pos(plan.delta1[t] - phase.alpha1[t])});
  return plan;
}

AllocationPlan make_last_phase_plan(const ExponentProfile& phase) {
  validate_profile(phase);
  AllocationPlan plan;
  plan.T = phase.n;
  plan.last_phase = true;
  plan.delta_bar = mean(phase.alpha2);
  plan.delta2 = phase.alpha2;
  plan.delta1 = solve_last_phase(phase.alpha1, plan.delta_bar);
  for (int t = 0; t < plan.T; ++t)
    plan.rates.push_back({plan.delta2[t], Rational(0), plan.delta1[t], Rational(0)});
  return plan;
}

}  // namespace miso
