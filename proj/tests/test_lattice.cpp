#include <cmath>
#include <random>

#include "common.hpp"
#include "miso/errors.hpp"
#include "miso/kernels.hpp"
#include "miso/lattice.hpp"
#include "miso/sphere.hpp"

using namespace miso;
using miso::test::R;

namespace {

Message random_message(const LatticeCode& c, std::mt19937_64& rng) {
  Message m(c.T);
  for (auto& x : m) x = static_cast<std::uint32_t>(rng() % c.q());
  return m;
}

Eigen::VectorXcd noisy(const Eigen::VectorXcd& x, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, sigma);
  Eigen::VectorXcd y = x;
  for (int t = 0; t < y.size(); ++t) y(t) += cplx(n(rng), n(rng));
  return y;
}

struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::force_isa(saved); }
};

}  // namespace

TEST_CASE("qam labels") {
  for (int bits = 1; bits <= 6; ++bits) {
    const std::uint32_t q = 1u << bits;
    const int Lr = 1 << ((bits + 1) / 2), Li = 1 << (bits / 2);
    auto level = [](double x, int L) { return static_cast<int>(x + L - 1) / 2; };
    double energy = 0;
    for (std::uint32_t i = 0; i < q; ++i) {
      const cplx p = qam_point(bits, i);
      CHECK(std::fmod(std::abs(p.real()), 2.0) == 1.0);
      energy += std::norm(p);
      CHECK(qam_index(bits, level(p.real(), Lr), level(p.imag(), Li)) == i);
      // Gray: right and upper neighbours differ in one bit
      for (const cplx d : {cplx(2, 0), cplx(0, 2)}) {
        const cplx n = p + d;
        if (std::abs(n.real()) < Lr && std::abs(n.imag()) < Li)
          CHECK(__builtin_popcount(i ^ qam_index(bits, level(n.real(), Lr), level(n.imag(), Li))) == 1);
      }
    }
    const LatticeCode c = make_code(1, bits, 1.0);
    CHECK(energy / q == doctest::Approx(mean_power(c)));
  }
}

TEST_CASE("rotations are unitary") {
  for (int T = 1; T <= 8; ++T) CHECK(unitarity_residual(rotation_matrix(T)) < 1e-10);
}

TEST_CASE("build_code") {
  const LatticeCode c = build_code(2, R(1, 2), R(1, 20), std::pow(10.0, 6.0));
  CHECK(c.bits_per_dim == static_cast<int>(std::floor(0.45 * 6 * std::log2(10.0))));
  CHECK(c.theta == doctest::Approx(std::pow(1e6, 0.275)));
  CHECK(c.levels_re * c.levels_im == static_cast<int>(c.q()));
  CHECK(build_code(2, R(1, 2), R(1, 20), 1e6, 3).bits_per_dim == c.bits_per_dim - 3);
  CHECK_THROWS_AS(build_code(2, R(1, 2), R(0), 1e6), ValidationError);
  CHECK_THROWS_AS(build_code(2, R(1, 2), R(1, 20), 2.0), RateUnderflow);
}

TEST_CASE("bit packing round trip") {
  std::mt19937_64 rng(1);
  const LatticeCode c = make_code(3, 5, 1.0);
  for (int it = 0; it < 100; ++it) {
    const Message m = random_message(c, rng);
    const auto bits = message_to_bits(c, m);
    CHECK(static_cast<int>(bits.size()) == c.total_bits());
    CHECK(bits_to_message(c, bits) == m);
  }
}

TEST_CASE("kernel variants are bit-identical") {
  if (!kernels::avx2_available()) return;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int T = 1; T <= 6; ++T)
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u}) {
      std::vector<double> br(T), bi(T), cr(T), ci(T), qr(n), qi(n), yr(T), yi(T), w(T);
      for (int t = 0; t < T; ++t) {
        br[t] = g(rng); bi[t] = g(rng); cr[t] = g(rng); ci[t] = g(rng);
        yr[t] = g(rng); yi[t] = g(rng); w[t] = std::abs(g(rng));
      }
      for (std::size_t k = 0; k < n; ++k) { qr[k] = g(rng); qi[k] = g(rng); }
      kernels::Batch b{T, br.data(), bi.data(), cr.data(), ci.data(), qr.data(), qi.data(), n};
      std::vector<double> s(n), v(n);
      kernels::scalar::weighted_metric(b, yr.data(), yi.data(), w.data(), s.data());
      kernels::avx2::weighted_metric(b, yr.data(), yi.data(), w.data(), v.data());
      CHECK(s == v);
      kernels::scalar::product_norm(b, s.data());
      kernels::avx2::product_norm(b, v.data());
      CHECK(s == v);
    }
}

TEST_CASE("decoders agree under both kernel variants") {
  IsaGuard guard;
  std::mt19937_64 rng(3);
  for (int T : {1, 2, 3}) {
    const LatticeCode c = make_code(T, 4, 1.0);
    for (int it = 0; it < 200; ++it) {
      const Message m = random_message(c, rng);
      const Eigen::VectorXcd y = noisy(encode(c, m), 1.2, rng);
      std::vector<double> w(T);
      for (auto& x : w) x = 0.5 + (rng() % 100) / 50.0;
      kernels::force_isa(kernels::Isa::Scalar);
      const DecodeResult es = decode_exhaustive(c, y, w);
      const DecodeResult ss = decode_sphere(c, y, w);
      CHECK(es.message == ss.message);
      CHECK_FALSE(ss.truncated);
      CHECK(es.metric == doctest::Approx(weighted_metric(c, y, w, es.message)));
      if (kernels::avx2_available()) {
        kernels::force_isa(kernels::Isa::Avx2);
        const DecodeResult ev = decode_exhaustive(c, y, w);
        CHECK(ev.message == es.message);
        CHECK(ev.metric == es.metric);
      }
    }
  }
}

TEST_CASE("noiseless decoding recovers the message") {
  std::mt19937_64 rng(4);
  for (int T : {1, 2, 4, 6}) {
    const LatticeCode c = make_code(T, 6, 3.0);
    for (int it = 0; it < 20; ++it) {
      const Message m = random_message(c, rng);
      CHECK(decode_weighted(c, encode(c, m), std::vector<double>(T, 1.0)).message == m);
    }
  }
}

TEST_CASE("product distance") {
  for (int T = 1; T <= 3; ++T) {
    const LatticeCode c1 = make_code(T, 2, 1.0);
    const LatticeCode c2 = make_code(T, 2, 2.0);
    const double d1 = min_product_distance(c1);
    CHECK(d1 > 0);
    CHECK(min_product_distance(c2) == std::ldexp(d1, 2 * T));
    CHECK(min_product_distance_pairs(c1) == doctest::Approx(d1).epsilon(1e-9));
  }
  CHECK_THROWS_AS(min_product_distance(make_code(4, 8, 1.0)), TooLargeToEnumerate);
}

TEST_CASE("sphere search on a small real lattice") {
  Eigen::MatrixXd G(2, 2);
  G << 1.0, 0.3, 0.0, 0.8;
  Eigen::VectorXd r(2);
  r << 0.9, -0.7;
  const SphereResult s = sphere_decode(G, r, {4, 4});
  double best = 1e300;
  std::vector<int> arg;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Eigen::VectorXd x(2);
      x << 2 * a - 3, 2 * b - 3;
      const double m = (r - G * x).squaredNorm();
      if (m < best) { best = m; arg = {a, b}; }
    }
  CHECK(s.levels == arg);
  CHECK(s.metric == doctest::Approx(best));
  const SphereResult cut = sphere_decode(G, r, {4, 4}, {}, 1);
  CHECK(cut.truncated);
}
