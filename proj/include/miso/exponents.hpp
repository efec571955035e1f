/**
 * @file exponents.hpp
 * @brief CSIT quality-exponent profiles and their long-term averages.
 */
#pragma once

#include <utility>
#include <vector>

#include "miso/rational.hpp"

namespace miso {

/// Per-slot current (alpha) and delayed (beta) quality exponents.
struct ExponentProfile {
  int n = 0;
  std::vector<Rational> alpha1, alpha2, beta1, beta2;
  int eta = 0;  ///< delayed-CSIT lag in slots; 0 means "phase length"
};

struct ExponentAverages {
  Rational a1, a2, b1, b2;
  bool operator==(const ExponentAverages&) const = default;
};

struct PeriodicFeedbackSpec {
  int Tc = 1;
  std::vector<std::pair<int, Rational>> events;  ///< (slot in [1,Tc], increment)
  Rational delayed_extra{0};                     ///< beta - alpha_Tc
};

ExponentProfile validate_profile(const ExponentProfile& p);
ExponentAverages averages(const ExponentProfile& p);
void validate_averages(const ExponentAverages& a);

/// Relabels users so that a2 <= a1. The flag is true when the users were swapped.
std::pair<ExponentAverages, bool> label_users(const ExponentAverages& a);

ExponentProfile make_periodic_profile(const PeriodicFeedbackSpec& spec, int periods);
ExponentProfile make_periodic_profile(const PeriodicFeedbackSpec& user1,
                                      const PeriodicFeedbackSpec& user2, int periods);

/// No current CSIT; user i gets perfect delayed CSIT on slots t = i (mod 3).
ExponentProfile make_mat_profile(int periods);

/// Constant exponents on every slot.
ExponentProfile make_constant_profile(int n, const Rational& alpha, const Rational& beta);

/// Alternating CSIT state frequencies (perfect lambdaP, delayed lambdaD) mapped
/// to equivalent exponent averages.
ExponentAverages alternating_csit_map(const Rational& lambdaP, const Rational& lambdaD);

/// Slots [first, first+len) of the profile, wrapping around its period.
ExponentProfile profile_window(const ExponentProfile& p, int first, int len);

}  // namespace miso
