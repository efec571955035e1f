/**
 * @file kernels.hpp
 * @brief Batched candidate-scoring kernels with a scalar reference and an AVX2
 * variant chosen at runtime. Both variants produce bit-identical results.
 *
 * Complex values are passed as split real/imaginary arrays. For each candidate
 * k the codeword is e_t = base_t + col_t * q_k.
 */
#pragma once

#include <cstddef>

namespace miso::kernels {

enum class Isa { Scalar, Avx2 };

bool avx2_available();
/// Currently selected implementation (AVX2 when available unless MISO_SIMD=scalar).
Isa active_isa();
/// Overrides the selection; requesting Avx2 on a machine without it throws.
void force_isa(Isa isa);
const char* isa_name(Isa isa);

struct Batch {
  int T = 0;
  const double* base_re = nullptr;
  const double* base_im = nullptr;
  const double* col_re = nullptr;
  const double* col_im = nullptr;
  const double* q_re = nullptr;  ///< n candidate values of the last coordinate
  const double* q_im = nullptr;
  std::size_t n = 0;
};

/// out[k] = sum_t w_t |y_t - e_t|^2, accumulated in t order.
void weighted_metric(const Batch& b, const double* y_re, const double* y_im, const double* w,
                     double* out);

/// out[k] = prod_t |e_t|^2, multiplied in t order.
void product_norm(const Batch& b, double* out);

namespace scalar {
void weighted_metric(const Batch& b, const double* y_re, const double* y_im, const double* w,
                     double* out);
void product_norm(const Batch& b, double* out);
}  // namespace scalar

namespace avx2 {
void weighted_metric(const Batch& b, const double* y_re, const double* y_im, const double* w,
                     double* out);
void product_norm(const Batch& b, double* out);
}  // namespace avx2

}  // namespace miso::kernels
