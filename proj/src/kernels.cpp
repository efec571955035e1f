/**
 * @file kernels.cpp
 * @brief Scalar reference kernels and runtime dispatch.
 */
#include "miso/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace miso::kernels {

namespace scalar {

void weighted_metric(const Batch& b, const double* y_re, const double* y_im, const double* w,
                     double* out) {
  for (std::size_t k = 0; k < b.n; ++k) {
    const double qr = b.q_re[k], qi = b.q_im[k];
    double acc = 0.0;
    for (int t = 0; t < b.T; ++t) {
      const double er = b.base_re[t] + (b.col_re[t] * qr - b.col_im[t] * qi);
      const double ei = b.base_im[t] + (b.col_re[t] * qi + b.col_im[t] * qr);
      const double dr = y_re[t] - er;
      const double di = y_im[t] - ei;
      acc = acc + w[t] * (dr * dr + di * di);
    }
    out[k] = acc;
  }
}

void product_norm(const Batch& b, double* out) {
  for (std::size_t k = 0; k < b.n; ++k) {
    const double qr = b.q_re[k], qi = b.q_im[k];
    double p = 1.0;
    for (int t = 0; t < b.T; ++t) {
      const double er = b.base_re[t] + (b.col_re[t] * qr - b.col_im[t] * qi);
      const double ei = b.base_im[t] + (b.col_re[t] * qi + b.col_im[t] * qr);
      p = p * (er * er + ei * ei);
    }
    out[k] = p;
  }
}

}  // namespace scalar

namespace {

Isa initial_isa() {
  const char* env = std::getenv("MISO_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return selected().load(); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) throw std::runtime_error("AVX2 not available");
  selected().store(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void weighted_metric(const Batch& b, const double* y_re, const double* y_im, const double* w,
                     double* out) {
  if (active_isa() == Isa::Avx2)
    avx2::weighted_metric(b, y_re, y_im, w, out);
  else
    scalar::weighted_metric(b, y_re, y_im, w, out);
}

void product_norm(const Batch& b, double* out) {
  if (active_isa() == Isa::Avx2)
    avx2::product_norm(b, out);
  else
    scalar::product_norm(b, out);
}

}  // namespace miso::kernels
