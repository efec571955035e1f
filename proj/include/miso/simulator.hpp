/**
 * @file simulator.hpp
 * @brief Finite-SNR execution of the phase-Markov scheme: channels, CSIT,
 * encoding, interference quantize-and-forward and backward decoding.
 *
 * Users are indexed 0 and 1. User 0 receives through h and owns symbols
 * (a, a'); user 1 receives through g and owns (b, b').
 */
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "miso/allocation.hpp"
#include "miso/exponents.hpp"
#include "miso/lattice.hpp"

namespace miso {

using Vec2 = Eigen::Vector2cd;

struct ChannelModel {
  enum Kind { Iid, Block } kind = Iid;
  int Tc = 1;
};

struct ChannelTrace {
  ChannelModel model;
  std::vector<Vec2> h, g;
};

ChannelTrace generate_channel(int n, const ChannelModel& model, std::uint64_t seed);

/// Current (hat) and delayed (chk) estimates per slot. Errors are h - estimate.
struct CsitTrace {
  std::vector<Vec2> h_hat, g_hat, h_chk, g_chk;
};

/// Error variance per complex entry is P^{-q}/2, so E||error||^2 = P^{-q}.
/// Estimates of one channel realization are successive refinements: each
/// estimate is independent of its own error.
CsitTrace generate_csit(const ChannelTrace& trace, const ExponentProfile& profile, double P,
                        std::uint64_t seed);

/// Unit vector v_perp with v^T v_perp = 0.
Vec2 perp(const Vec2& v);
/// Unit vector along conj(v), so v^T dir(v) = ||v||.
Vec2 along(const Vec2& v);

struct Stream {
  int bits = 0;
  std::uint32_t index = 0;  ///< Gray-labeled QAM index
  double amp = 0.0;         ///< grid point -> transmitted scale
  double power = 0.0;       ///< average transmitted power
  cplx value{0.0, 0.0};     ///< transmitted symbol
  Vec2 dir = Vec2::Zero();
};

struct SlotSignal {
  Stream own[2][2];    ///< [user][0: a or b, 1: a' or b']
  Vec2 w = Vec2::Zero();
  double c_gain = 0.0; ///< transmitted common = c_gain * lattice codeword
  cplx c{0.0, 0.0};    ///< transmitted common symbol
  Vec2 x = Vec2::Zero();
};

struct PhaseSignals {
  int phase = 0;
  bool last = false;
  LatticeCode code;
  Message common;
  std::vector<std::uint8_t> common_bits;
  std::vector<SlotSignal> slots;
};

/// Common payload layout of one phase (bit offsets into common_bits).
struct PayloadLayout {
  int carried = 0;  ///< quantized bits of the previous phase (filler in phase 1)
  int fresh[2] = {0, 0};
  int filler = 0;
};

struct SimOptions {
  Rational epsilon{Rational(1) / 20};
  double range_factor = 3.0;
  int common_backoff_bits = 4;
  int private_backoff_bits = 3;
  std::uint64_t node_limit = 4000000;
  bool genie = false;  ///< decode with the true next-phase common bits
};

struct QuantizedSlot {
  cplx iota{0.0, 0.0};   ///< true overheard interference
  cplx chk{0.0, 0.0};    ///< reconstruction from delayed CSIT
  cplx bar{0.0, 0.0};    ///< quantized value
  double range = 0.0;    ///< per real part
  int bits = 0;
  bool clipped = false;
  double noise_var = 0.0;  ///< (step_re^2 + step_im^2)/12, or the power of chk when bits = 0
};

/// [user][slot]
using InterferenceRecord = std::array<std::vector<QuantizedSlot>, 2>;

/// Transmit side of one phase. power_scale[u][t] multiplies the nominal power
/// of user u's private streams (empty: 1).
PhaseSignals encode_phase(int phase, bool last, const AllocationPlan& plan, const LatticeCode& code,
                          const std::vector<std::uint8_t>& common_bits,
                          const std::array<std::array<std::vector<std::uint32_t>, 2>, 2>& private_idx,
                          const std::array<std::array<std::vector<int>, 2>, 2>& private_bits,
                          const CsitTrace& csit, int first_slot, const std::vector<Vec2>& w,
                          double P, const std::array<std::vector<double>, 2>& power_scale = {});

/// Per-user observations of the phase slots.
std::array<std::vector<cplx>, 2> transmit_receive(const ChannelTrace& trace, const PhaseSignals& s,
                                                  int first_slot, std::uint64_t noise_seed,
                                                  double noise_var = 1.0);

/// Quantizes the interference each user overheard. bits[u][t] is the budget.
InterferenceRecord quantize_interference(const ChannelTrace& trace, const CsitTrace& csit,
                                         const PhaseSignals& s, int first_slot,
                                         const std::array<std::vector<int>, 2>& bits,
                                         double range_factor);

/// Rebuilds quantized values from their bit strings (receiver side).
cplx dequantize(std::uint32_t idx_re, std::uint32_t idx_im, int bits, double range);
void quantize_value(cplx v, int bits, double range, std::uint32_t* idx_re, std::uint32_t* idx_im,
                    bool* clipped);

/// Nominal per-slot quantizer budgets floor((delta - alpha)^+ log2 P).
std::array<std::vector<int>, 2> nominal_quantizer_bits(const AllocationPlan& plan,
                                                       const ExponentProfile& phase, double P);

/// Removes bits one at a time from the largest budget (earliest on ties) until
/// the total fits.
void trim_to_capacity(std::array<std::vector<int>, 2>& bits, int capacity);

struct UserStats {
  long long delivered_bits = 0;   ///< correct private + fresh common bits, phases 1..S-1
  long long offered_bits = 0;     ///< private + fresh bits sent in phases 1..S-1
  long long private_symbols = 0;
  long long private_symbol_errors = 0;
  long long common_decodes = 0;
  long long common_failures = 0;
  long long search_truncated = 0;
  double residual_power = 0.0;    ///< sum of |iota - bar iota|^2
  long long residual_samples = 0;
};

struct SimResult {
  std::array<UserStats, 2> user;
  long long slots_counted = 0;    ///< (S-1) * T
  long long quant_samples = 0;
  long long clips = 0;
  double quant_noise_power = 0.0; ///< sum of |chk - bar|^2 over quantized samples
  long long quant_bits_nominal = 0;
  long long quant_bits_sent = 0;
  double mi_proxy_bits = 0.0;     ///< Gaussian-approximation MI of the common streams
  long long common_payload_bits = 0;
  /// common_ok[u][s]: user u decoded phase s common symbols correctly
  std::array<std::vector<bool>, 2> common_ok;
  /// private_ok[u][s]: all private symbols of user u in phase s are correct
  std::array<std::vector<bool>, 2> private_ok;
};

struct RunSpec {
  ExponentProfile profile;  ///< labeled users (mean alpha2 <= mean alpha1)
  Rational delta_bar{0};
  Rational omega{0};
  int phases = 10;
  int phase_len = 0;        ///< 0: profile length
  ChannelModel channel;
  SimOptions options;
};

/// Checks that every phase window averages to the long-term averages.
void validate_run_spec(const RunSpec& spec);

SimResult simulate_run(const RunSpec& spec, double P, std::uint64_t seed);

/// Mixes a seed with stream tags (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace miso
