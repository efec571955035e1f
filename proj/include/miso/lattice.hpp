/**
 * @file lattice.hpp
 * @brief Rotated QAM lattice codes for the common symbols.
 *
 * Codewords are c = theta * M * q with q a vector of T QAM points on the odd
 * integer grid (spacing 2) and M a unitary full-diversity rotation.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "miso/rational.hpp"

namespace miso {

using cplx = std::complex<double>;

/// Per-coordinate symbol indices, each in [0, 2^bits_per_dim).
using Message = std::vector<std::uint32_t>;

struct LatticeCode {
  int T = 1;
  int bits_per_dim = 0;  ///< bits per complex coordinate; q = 2^bits_per_dim
  int levels_re = 1;     ///< PAM size of the real part, 2^ceil(bits/2)
  int levels_im = 1;     ///< PAM size of the imaginary part, 2^floor(bits/2)
  double theta = 1.0;
  Eigen::MatrixXcd M;    ///< unitary rotation
  Eigen::MatrixXcd G;    ///< theta * M
  Rational rate_prelog{0};
  Rational delta_bar_star{0};
  Rational epsilon{0};
  double P = 1.0;

  std::uint64_t q() const { return std::uint64_t{1} << bits_per_dim; }
  int total_bits() const { return T * bits_per_dim; }
};

/// theta * M for the given exponents; bits_per_dim = floor(r log2 P) - backoff_bits
/// with r = 1 - delta_bar_star - epsilon.
LatticeCode build_code(int T, const Rational& delta_bar_star, const Rational& epsilon, double P,
                       int backoff_bits = 0);

/// Code with an explicit constellation size and scaling.
LatticeCode make_code(int T, int bits_per_dim, double theta);

/// Unitary T x T rotation with non-vanishing product distance over Z[i]^T.
Eigen::MatrixXcd rotation_matrix(int T);

/// Gray-labeled point of the 2^bits rectangular QAM on the odd grid.
cplx qam_point(int bits, std::uint32_t index);
/// Inverse of qam_point given the PAM level indices u in [0, L) of each part.
std::uint32_t qam_index(int bits, int level_re, int level_im);

Eigen::VectorXcd encode(const LatticeCode& code, const Message& m);

/// Mean per-coordinate energy E|c_t|^2 over the uniform message set.
double mean_power(const LatticeCode& code);

std::uint64_t message_index(const LatticeCode& code, const Message& m);

/// y_t = c_t + P^{delta_t/2} z_t, decoded with weights P^{-delta_t}.
struct WhitenedObservation {
  Eigen::VectorXcd ybar;
  std::vector<double> noise_exponents;
  double P = 1.0;
};

struct DecodeResult {
  Message message;
  double metric = 0.0;
  bool truncated = false;
};

/// ML decoding of y_t = c_t + n_t with metric sum_t w_t |y_t - c_t|^2.
/// Exhaustive when total_bits <= exhaustive_bits, sphere search otherwise; both
/// return the lowest message index among metric ties.
DecodeResult decode_weighted(const LatticeCode& code, const Eigen::VectorXcd& y,
                             const std::vector<double>& w, int exhaustive_bits = 24);
DecodeResult decode_exhaustive(const LatticeCode& code, const Eigen::VectorXcd& y,
                               const std::vector<double>& w);
DecodeResult decode_sphere(const LatticeCode& code, const Eigen::VectorXcd& y,
                           const std::vector<double>& w);
Message decode(const LatticeCode& code, const WhitenedObservation& obs);

/// The scoring function shared by all decoders.
double weighted_metric(const LatticeCode& code, const Eigen::VectorXcd& y,
                       const std::vector<double>& w, const Message& m);

/// min over distinct codeword pairs of prod_t |c_t - c'_t|^2.
double min_product_distance(const LatticeCode& code);

/// Same quantity by direct enumeration of codeword pairs (reference).
double min_product_distance_pairs(const LatticeCode& code);

double unitarity_residual(const Eigen::MatrixXcd& M);

/// Bits <-> message packing, most significant coordinate first.
Message bits_to_message(const LatticeCode& code, const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> message_to_bits(const LatticeCode& code, const Message& m);

}  // namespace miso
