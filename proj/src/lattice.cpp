/**
 * @file lattice.cpp
 */
#include "miso/lattice.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "miso/errors.hpp"
#include "miso/kernels.hpp"
#include "miso/sphere.hpp"

namespace miso {

namespace {

constexpr std::uint64_t kMaxPairs = std::uint64_t{1} << 20;

int pam_level(int bits, std::uint32_t gray) {
  std::uint32_t v = gray;
  for (std::uint32_t s = gray >> 1; s; s >>= 1) v ^= s;
  (void)bits;
  return static_cast<int>(v);
}

std::vector<cplx> constellation(int bits) {
  std::vector<cplx> pts(std::size_t{1} << bits);
  for (std::uint32_t i = 0; i < pts.size(); ++i) pts[i] = qam_point(bits, i);
  return pts;
}

// c_t = sum_j G_tj q_j accumulated in j order; the kernels repeat this order.
void accumulate(const LatticeCode& code, int upto, const std::vector<cplx>& q, double* re,
                double* im) {
  for (int t = 0; t < code.T; ++t) {
    double cr = 0.0, ci = 0.0;
    for (int j = 0; j < upto; ++j) {
      const double gr = code.G(t, j).real(), gi = code.G(t, j).imag();
      cr = cr + (gr * q[j].real() - gi * q[j].imag());
      ci = ci + (gr * q[j].imag() + gi * q[j].real());
    }
    re[t] = cr;
    im[t] = ci;
  }
}

}  // namespace

Eigen::MatrixXcd rotation_matrix(int T) {
  if (T < 1) throw ValidationError("lattice dimension must be positive");
  // Rows are the conjugates of zeta^j under zeta -> zeta * omega^k, where
  // zeta^T = i (T a power of two) or zeta^T = (2+i)/(2-i) otherwise. In both
  // cases x^T - zeta^T is irreducible over Q(i), so the product distance of
  // Z[i]^T never vanishes.
  const bool pow2 = (T & (T - 1)) == 0;
  const double phi = pow2 ? std::numbers::pi / 2.0 : std::atan2(4.0, 3.0);
  Eigen::MatrixXcd M(T, T);
  const double scale = 1.0 / std::sqrt(static_cast<double>(T));
  for (int k = 0; k < T; ++k)
    for (int j = 0; j < T; ++j) {
      const double ang = j * phi / T + 2.0 * std::numbers::pi * ((k * j) % T) / T;
      M(k, j) = std::polar(scale, ang);
    }
  if (T == 1) M(0, 0) = 1.0;
  return M;
}

double unitarity_residual(const Eigen::MatrixXcd& M) {
  const auto I = Eigen::MatrixXcd::Identity(M.rows(), M.cols());
  return (M.adjoint() * M - I).norm();
}

cplx qam_point(int bits, std::uint32_t index) {
  const int br = (bits + 1) / 2, bi = bits / 2;
  const int Lr = 1 << br, Li = 1 << bi;
  const std::uint32_t gr = index >> bi, gi = index & ((1u << bi) - 1);
  const int lr = pam_level(br, gr), li = pam_level(bi, gi);
  return {static_cast<double>(2 * lr - (Lr - 1)), static_cast<double>(2 * li - (Li - 1))};
}

std::uint32_t qam_index(int bits, int level_re, int level_im) {
  const int bi = bits / 2;
  const auto gray = [](std::uint32_t v) { return v ^ (v >> 1); };
  return (gray(static_cast<std::uint32_t>(level_re)) << bi) |
         gray(static_cast<std::uint32_t>(level_im));
}

LatticeCode make_code(int T, int bits_per_dim, double theta) {
  if (T < 1) throw ValidationError("lattice dimension must be positive");
  if (bits_per_dim < 0 || bits_per_dim > 30) throw ValidationError("bits per coordinate out of range");
  if (!(theta > 0)) throw ValidationError("theta must be positive");
  LatticeCode c;
  c.T = T;
  c.bits_per_dim = bits_per_dim;
  c.levels_re = 1 << ((bits_per_dim + 1) / 2);
  c.levels_im = 1 << (bits_per_dim / 2);
  c.theta = theta;
  c.M = rotation_matrix(T);
  c.G = theta * c.M;
  return c;
}

LatticeCode build_code(int T, const Rational& delta_bar_star, const Rational& epsilon, double P,
                       int backoff_bits) {
  if (epsilon <= 0) throw ValidationError("epsilon must be positive");
  if (delta_bar_star < 0 || delta_bar_star + epsilon > 1)
    throw ValidationError("need 0 <= delta_bar_star and delta_bar_star + epsilon <= 1");
  if (!(P > 1)) throw ValidationError("P must exceed 1");
  const Rational r = 1 - delta_bar_star - epsilon;
  const int bits =
      static_cast<int>(std::floor(to_double(r) * std::log2(P) + 1e-9)) - backoff_bits;
  if (bits < 1) throw RateUnderflow("P too small for one bit per coordinate");
  const double theta = std::pow(P, to_double(delta_bar_star + epsilon) / 2.0);
  LatticeCode c = make_code(T, bits, theta);
  c.rate_prelog = r;
  c.delta_bar_star = delta_bar_star;
  c.epsilon = epsilon;
  c.P = P;
  return c;
}

Eigen::VectorXcd encode(const LatticeCode& code, const Message& m) {
  if (static_cast<int>(m.size()) != code.T) throw ValidationError("message length != T");
  std::vector<cplx> q(code.T);
  for (int j = 0; j < code.T; ++j) {
    if (m[j] >= code.q()) throw ValidationError("symbol index outside constellation");
    q[j] = qam_point(code.bits_per_dim, m[j]);
  }
  std::vector<double> re(code.T), im(code.T);
  accumulate(code, code.T, q, re.data(), im.data());
  Eigen::VectorXcd c(code.T);
  for (int t = 0; t < code.T; ++t) c(t) = {re[t], im[t]};
  return c;
}

double mean_power(const LatticeCode& code) {
  const double Lr = code.levels_re, Li = code.levels_im;
  return code.theta * code.theta * ((Lr * Lr - 1) + (Li * Li - 1)) / 3.0;
}

std::uint64_t message_index(const LatticeCode& code, const Message& m) {
  std::uint64_t idx = 0;
  for (int j = 0; j < code.T; ++j) idx = (idx << code.bits_per_dim) | m[j];
  return idx;
}

double weighted_metric(const LatticeCode& code, const Eigen::VectorXcd& y,
                       const std::vector<double>& w, const Message& m) {
  const Eigen::VectorXcd c = encode(code, m);
  double acc = 0.0;
  for (int t = 0; t < code.T; ++t) {
    const double dr = y(t).real() - c(t).real();
    const double di = y(t).imag() - c(t).imag();
    acc = acc + w[t] * (dr * dr + di * di);
  }
  return acc;
}

DecodeResult decode_exhaustive(const LatticeCode& code, const Eigen::VectorXcd& y,
                               const std::vector<double>& w) {
  const int T = code.T;
  const auto pts = constellation(code.bits_per_dim);
  std::vector<double> qre(pts.size()), qim(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    qre[i] = pts[i].real();
    qim[i] = pts[i].imag();
  }
  std::vector<double> yre(T), yim(T), bre(T), bim(T), cre(T), cim(T), out(pts.size());
  for (int t = 0; t < T; ++t) {
    yre[t] = y(t).real();
    yim[t] = y(t).imag();
    cre[t] = code.G(t, T - 1).real();
    cim[t] = code.G(t, T - 1).imag();
  }
  kernels::Batch b{T, bre.data(), bim.data(), cre.data(), cim.data(), qre.data(), qim.data(),
                   pts.size()};
  DecodeResult best;
  best.metric = std::numeric_limits<double>::infinity();
  const std::uint64_t prefixes = std::uint64_t{1} << (code.bits_per_dim * (T - 1));
  Message prefix(T, 0);
  std::vector<cplx> q(T);
  for (std::uint64_t p = 0; p < prefixes; ++p) {
    std::uint64_t rest = p;
    for (int j = T - 2; j >= 0; --j) {
      prefix[j] = static_cast<std::uint32_t>(rest & (code.q() - 1));
      rest >>= code.bits_per_dim;
      q[j] = pts[prefix[j]];
    }
    accumulate(code, T - 1, q, bre.data(), bim.data());
    kernels::weighted_metric(b, yre.data(), yim.data(), w.data(), out.data());
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (out[k] < best.metric) {
        best.metric = out[k];
        prefix[T - 1] = static_cast<std::uint32_t>(k);
        best.message = prefix;
      }
  }
  return best;
}

DecodeResult decode_sphere(const LatticeCode& code, const Eigen::VectorXcd& y,
                           const std::vector<double>& w) {
  const int T = code.T;
  // Real model over s = [Re q; Im q] with rows scaled by sqrt(w_t).
  Eigen::MatrixXd A(2 * T, 2 * T);
  Eigen::VectorXd r(2 * T);
  for (int t = 0; t < T; ++t) {
    const double sw = std::sqrt(w[t]);
    r(t) = sw * y(t).real();
    r(T + t) = sw * y(t).imag();
    for (int j = 0; j < T; ++j) {
      const double gr = sw * code.G(t, j).real(), gi = sw * code.G(t, j).imag();
      A(t, j) = gr;
      A(t, T + j) = -gi;
      A(T + t, j) = gi;
      A(T + t, T + j) = gr;
    }
  }
  std::vector<int> levels(2 * T);
  for (int j = 0; j < T; ++j) {
    levels[j] = code.levels_re;
    levels[T + j] = code.levels_im;
  }
  Message m(T);
  auto to_message = [&](const std::vector<int>& u) {
    for (int j = 0; j < T; ++j) m[j] = qam_index(code.bits_per_dim, u[j], u[T + j]);
  };
  LeafScore leaf = [&](const std::vector<int>& u) {
    to_message(u);
    return std::make_pair(weighted_metric(code, y, w, m), message_index(code, m));
  };
  SphereResult s = sphere_decode(A, r, levels, leaf);
  to_message(s.levels);
  return {m, s.metric, s.truncated};
}

DecodeResult decode_weighted(const LatticeCode& code, const Eigen::VectorXcd& y,
                             const std::vector<double>& w, int exhaustive_bits) {
  if (y.size() != code.T || static_cast<int>(w.size()) != code.T)
    throw ValidationError("observation length != T");
  if (code.total_bits() <= exhaustive_bits) return decode_exhaustive(code, y, w);
  return decode_sphere(code, y, w);
}

Message decode(const LatticeCode& code, const WhitenedObservation& obs) {
  if (static_cast<int>(obs.noise_exponents.size()) != code.T)
    throw ValidationError("noise exponent count != T");
  std::vector<double> w(code.T);
  for (int t = 0; t < code.T; ++t) w[t] = std::pow(obs.P, -obs.noise_exponents[t]);
  return decode_weighted(code, obs.ybar, w).message;
}

double min_product_distance(const LatticeCode& code) {
  const int T = code.T;
  const long double msgs = std::pow(2.0L, code.total_bits());
  if (msgs * (msgs - 1) / 2 > static_cast<long double>(kMaxPairs))
    throw TooLargeToEnumerate("more than 2^20 codeword pairs");
  // Differences of QAM points per coordinate: 2a + 2bi with |a| < Lr, |b| < Li.
  std::vector<cplx> diffs;
  for (int a = -(code.levels_re - 1); a <= code.levels_re - 1; ++a)
    for (int b = -(code.levels_im - 1); b <= code.levels_im - 1; ++b)
      diffs.emplace_back(2.0 * a, 2.0 * b);
  const std::size_t D = diffs.size();
  const std::size_t zero = D / 2;  // a = b = 0 sits in the middle
  std::vector<double> dre(D), dim(D), bre(T), bim(T), cre(T), cim(T), out(D);
  for (std::size_t i = 0; i < D; ++i) {
    dre[i] = diffs[i].real();
    dim[i] = diffs[i].imag();
  }
  for (int t = 0; t < T; ++t) {
    cre[t] = code.G(t, T - 1).real();
    cim[t] = code.G(t, T - 1).imag();
  }
  kernels::Batch b{T, bre.data(), bim.data(), cre.data(), cim.data(), dre.data(), dim.data(), D};
  double best = std::numeric_limits<double>::infinity();
  std::size_t prefixes = 1;
  for (int j = 0; j < T - 1; ++j) prefixes *= D;
  std::vector<cplx> q(T);
  for (std::size_t p = 0; p < prefixes; ++p) {
    std::size_t rest = p;
    bool all_zero = true;
    for (int j = T - 2; j >= 0; --j) {
      const std::size_t k = rest % D;
      rest /= D;
      q[j] = diffs[k];
      all_zero = all_zero && k == zero;
    }
    accumulate(code, T - 1, q, bre.data(), bim.data());
    kernels::product_norm(b, out.data());
    if (all_zero) out[zero] = std::numeric_limits<double>::infinity();
    for (double v : out) best = std::min(best, v);
  }
  return best;
}

double min_product_distance_pairs(const LatticeCode& code) {
  const std::uint64_t n = std::uint64_t{1} << code.total_bits();
  if (n * (n - 1) / 2 > kMaxPairs) throw TooLargeToEnumerate("more than 2^20 codeword pairs");
  std::vector<Eigen::VectorXcd> words;
  Message m(code.T);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t rest = i;
    for (int j = code.T - 1; j >= 0; --j) {
      m[j] = static_cast<std::uint32_t>(rest & (code.q() - 1));
      rest >>= code.bits_per_dim;
    }
    words.push_back(encode(code, m));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t k = i + 1; k < n; ++k) {
      double p = 1.0;
      for (int t = 0; t < code.T; ++t) p *= std::norm(words[i](t) - words[k](t));
      best = std::min(best, p);
    }
  return best;
}

Message bits_to_message(const LatticeCode& code, const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != code.total_bits())
    throw ValidationError("bit count != code payload");
  Message m(code.T, 0);
  for (int j = 0; j < code.T; ++j)
    for (int b = 0; b < code.bits_per_dim; ++b)
      m[j] = (m[j] << 1) | bits[static_cast<std::size_t>(j * code.bits_per_dim + b)];
  return m;
}

std::vector<std::uint8_t> message_to_bits(const LatticeCode& code, const Message& m) {
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(code.total_bits()));
  for (int j = 0; j < code.T; ++j)
    for (int b = code.bits_per_dim - 1; b >= 0; --b) bits.push_back((m[j] >> b) & 1u);
  return bits;
}

}  // namespace miso
