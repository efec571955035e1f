/**
 * @file harness.hpp
 * @brief SNR sweeps over the simulator, delivered-rate accounting, slope
 * fitting and planner comparison.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "miso/region.hpp"
#include "miso/simulator.hpp"

namespace miso {

struct ExperimentConfig {
  ExponentProfile profile;
  std::optional<char> corner;  ///< corner label, or explicit (delta_bar, omega)
  Rational delta_bar{0};
  Rational omega{0};
  std::vector<double> snr_db{30, 40, 50, 60, 70};
  int phases = 10;
  int phase_len = 0;
  std::uint64_t seed = 1;
  int trials = 1;
  ChannelModel channel;
  SimOptions options;
  double tolerance = 0.25;  ///< per-user |slope - prediction| in compare()
  int threads = 0;          ///< 0: hardware concurrency
};

struct RatePoint {
  double snr_db = 0.0;
  double log2P = 0.0;
  long long delivered_bits[2] = {0, 0};
  long long slots = 0;  ///< counted slots summed over trials
  long long common_failures[2] = {0, 0};
  long long private_symbol_errors[2] = {0, 0};
  long long private_symbols[2] = {0, 0};
  long long search_truncated = 0;
  long long quant_samples = 0;
  long long clips = 0;
  double quant_noise_power = 0.0;
  double residual_power[2] = {0.0, 0.0};
  long long residual_samples[2] = {0, 0};

  double bits_per_slot(int u) const {
    return slots > 0 ? static_cast<double>(delivered_bits[u]) / static_cast<double>(slots) : 0.0;
  }
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS
};

struct RateReport {
  ExponentAverages averages;  ///< labeled
  bool users_swapped = false; ///< user 0 of the report is user 1 of the input
  Rational delta_bar{0};
  Rational omega{0};
  std::string corner;         ///< "" for explicit parameters
  std::vector<RatePoint> points;
  SlopeFit fit[2];
  DofPoint predicted;         ///< planner prediction for (delta_bar, omega)
  bool tight = false;         ///< delayed-CSIT condition holds
};

/// OLS slope of bits per slot against log2 P. Needs at least 3 distinct abscissae.
SlopeFit fit_dof_slope(const std::vector<std::pair<double, double>>& points);

/// Resolves the scheme parameters of a config against its labeled averages.
std::pair<Rational, Rational> resolve_params(const ExperimentConfig& cfg);

RateReport run_experiment(const ExperimentConfig& cfg);

struct Verdict {
  int user = 0;
  double predicted = 0.0;
  double measured = 0.0;
  double diff = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<Verdict> compare(const RateReport& report, double tolerance);

/// Swaps the users of a profile.
ExponentProfile swap_users(const ExponentProfile& p);

}  // namespace miso
