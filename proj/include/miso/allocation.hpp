/**
 * @file allocation.hpp
 * @brief Per-slot power exponents, rate prelogs and phase bit budgets.
 */
#pragma once

#include <vector>

#include "miso/exponents.hpp"
#include "miso/rational.hpp"
#include "miso/region.hpp"

namespace miso {

/// Rate prelogs of the private symbols in one slot.
struct SlotRates {
  Rational r_a, r_a2, r_b, r_b2;  ///< a, a', b, b'
};

struct AllocationPlan {
  int T = 0;
  std::vector<Rational> delta1, delta2;
  std::vector<SlotRates> rates;
  Rational delta_bar;
  bool last_phase = false;
};

/// Bit prelogs per phase, in units of T*log P.
struct PhaseBudget {
  Rational private1, private2, common, quantized, delta_com, omega;
};

/// Largest admissible delta_bar: min{b1, b2, (1+a1+a2)/3, (1+min a)/2}.
Rational delta_bar_bound(const ExponentAverages& a);

/// Power exponents with delta_t <= beta_t, mean delta_bar and
/// mean (delta - alpha)^+ = (delta_bar - mean alpha)^+.
std::vector<Rational> solve_delta_sequence(const std::vector<Rational>& alpha,
                                           const std::vector<Rational>& beta,
                                           const Rational& delta_bar);

/// Last-phase exponents: delta_t <= alpha1_t with the given mean.
std::vector<Rational> solve_last_phase(const std::vector<Rational>& alpha1,
                                       const Rational& target_mean);

PhaseBudget phase_budget(const ExponentAverages& a, const Rational& delta_bar,
                         const Rational& omega);

DofPoint dof_from_params(const ExponentAverages& a, const Rational& delta_bar,
                         const Rational& omega);

/// Plan for one regular phase; `phase` holds exactly the T slots of the phase.
AllocationPlan make_plan(const ExponentProfile& phase, const Rational& delta_bar);

/// Plan for the terminating phase.
AllocationPlan make_last_phase_plan(const ExponentProfile& phase);

/// Throws unless the three defining constraints hold exactly.
void verify_delta_sequence(const std::vector<Rational>& alpha, const std::vector<Rational>& beta,
                           const Rational& delta_bar, const std::vector<Rational>& delta);

}  // namespace miso
