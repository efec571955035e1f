/**
 * @file simulator.cpp
 */
#include "miso/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>

#include "miso/errors.hpp"
#include "miso/sphere.hpp"

namespace miso {

namespace {

using Rng = std::mt19937_64;

cplx cn(Rng& rng, double var) {
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

Vec2 cn2(Rng& rng, double var) { return Vec2(cn(rng, var), cn(rng, var)); }

double error_var(double P, const Rational& q) { return 0.5 * std::pow(P, -to_double(q)); }

int load_bits(const Rational& prelog, double L, int backoff) {
  if (prelog <= 0) return 0;
  return std::max(0, static_cast<int>(std::floor(to_double(prelog) * L + 1e-9)) - backoff);
}

double grid_energy(int bits) {
  const double Lr = 1 << ((bits + 1) / 2), Li = 1 << (bits / 2);
  return ((Lr * Lr - 1) + (Li * Li - 1)) / 3.0;
}

cplx tdot(const Vec2& h, const Vec2& v) { return h(0) * v(0) + h(1) * v(1); }

// Successive refinements of one realization; qualities sorted finest first.
void refine(const Vec2& h, const std::vector<Rational>& qualities, double P, Rng& rng,
            std::map<Rational, Vec2>& out) {
  Vec2 x = h;
  double sx = 1.0;
  for (const auto& q : qualities) {
    const double sy = 1.0 - error_var(P, q);
    const double rho = sy / sx;
    const double sig2 = std::max(0.0, sy - sy * sy / sx);
    Vec2 y = rho * x + cn2(rng, sig2);
    out[q] = y;
    x = y;
    sx = sy;
  }
}

void put_bits(std::vector<std::uint8_t>& dst, std::uint32_t v, int nbits) {
  for (int b = nbits - 1; b >= 0; --b) dst.push_back((v >> b) & 1u);
}

std::uint32_t get_bits(const std::vector<std::uint8_t>& src, std::size_t& pos, int nbits) {
  std::uint32_t v = 0;
  for (int b = 0; b < nbits; ++b) v = (v << 1) | src[pos++];
  return v;
}

int correct_bits(std::uint32_t a, std::uint32_t b, int nbits) {
  const std::uint32_t mask = nbits >= 32 ? ~0u : ((1u << nbits) - 1);
  return nbits - std::popcount((a ^ b) & mask);
}

std::uint32_t slice_index(cplx z, int bits) {
  const int Lr = 1 << ((bits + 1) / 2), Li = 1 << (bits / 2);
  auto level = [](double v, int L) {
    long l = std::lround((v + (L - 1)) / 2.0);
    return static_cast<int>(std::clamp<long>(l, 0, L - 1));
  };
  return qam_index(bits, level(z.real(), Lr), level(z.imag(), Li));
}

struct PhaseSetup {
  ExponentProfile window;
  AllocationPlan plan;
  LatticeCode code;
  bool has_common = false;
  std::array<std::array<std::vector<int>, 2>, 2> private_bits;  // [user][stream][t]
  std::array<std::vector<double>, 2> power_scale;               // [user][t]
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

ChannelTrace generate_channel(int n, const ChannelModel& model, std::uint64_t seed) {
  if (n < 1) throw ValidationError("channel trace needs at least one slot");
  if (model.kind == ChannelModel::Block && model.Tc < 1)
    throw ValidationError("coherence period must be positive");
  Rng rng(seed);
  ChannelTrace tr;
  tr.model = model;
  const int block = model.kind == ChannelModel::Block ? model.Tc : 1;
  for (int t = 0; t < n; ++t) {
    if (t % block == 0) {
      tr.h.push_back(cn2(rng, 1.0));
      tr.g.push_back(cn2(rng, 1.0));
    } else {
      tr.h.push_back(tr.h.back());
      tr.g.push_back(tr.g.back());
    }
  }
  return tr;
}

CsitTrace generate_csit(const ChannelTrace& trace, const ExponentProfile& profile, double P,
                        std::uint64_t seed) {
  validate_profile(profile);
  const int n = static_cast<int>(trace.h.size());
  if (profile.n != n) throw LengthMismatch("profile length differs from channel trace");
  const int block = trace.model.kind == ChannelModel::Block ? trace.model.Tc : 1;
  CsitTrace cs;
  cs.h_hat.resize(n);
  cs.g_hat.resize(n);
  cs.h_chk.resize(n);
  cs.g_chk.resize(n);
  for (int user = 0; user < 2; ++user) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(user)));
    const auto& ch = user == 0 ? trace.h : trace.g;
    const auto& al = user == 0 ? profile.alpha1 : profile.alpha2;
    const auto& be = user == 0 ? profile.beta1 : profile.beta2;
    auto& hat = user == 0 ? cs.h_hat : cs.g_hat;
    auto& chk = user == 0 ? cs.h_chk : cs.g_chk;
    for (int start = 0; start < n; start += block) {
      const int end = std::min(n, start + block);
      std::vector<Rational> qs;
      for (int t = start; t < end; ++t) {
        qs.push_back(al[t]);
        qs.push_back(be[t]);
      }
      std::sort(qs.begin(), qs.end(), std::greater<>());
      qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
      std::map<Rational, Vec2> est;
      refine(ch[start], qs, P, rng, est);
      for (int t = start; t < end; ++t) {
        hat[t] = est.at(al[t]);
        chk[t] = est.at(be[t]);
      }
    }
  }
  return cs;
}

Vec2 perp(const Vec2& v) {
  const double n = v.norm();
  if (n == 0.0) return Vec2(0.0, 1.0);
  return Vec2(-v(1) / n, v(0) / n);
}

Vec2 along(const Vec2& v) {
  const double n = v.norm();
  if (n == 0.0) return Vec2(1.0, 0.0);
  return v.conjugate() / n;
}

PhaseSignals encode_phase(int phase, bool last, const AllocationPlan& plan, const LatticeCode& code,
                          const std::vector<std::uint8_t>& common_bits,
                          const std::array<std::array<std::vector<std::uint32_t>, 2>, 2>& private_idx,
                          const std::array<std::array<std::vector<int>, 2>, 2>& private_bits,
                          const CsitTrace& csit, int first_slot, const std::vector<Vec2>& w,
                          double P, const std::array<std::vector<double>, 2>& power_scale) {
  if (static_cast<int>(common_bits.size()) != code.total_bits())
    throw BitOverflow("common payload does not match the common code capacity");
  PhaseSignals s;
  s.phase = phase;
  s.last = last;
  s.code = code;
  s.common_bits = common_bits;
  s.common = bits_to_message(code, common_bits);
  const Eigen::VectorXcd cw = encode(code, s.common);
  const bool has_common = code.bits_per_dim > 0;
  const double rho = has_common ? std::sqrt(P / mean_power(code)) : 0.0;
  auto scale = [&](int u, int t) {
    return power_scale[u].empty() ? 1.0 : power_scale[u][t];
  };
  for (int t = 0; t < plan.T; ++t) {
    const int g = first_slot + t;
    SlotSignal sl;
    sl.w = w[g];
    const Vec2& hh = csit.h_hat[g];
    const Vec2& gh = csit.g_hat[g];
    sl.own[0][0].dir = perp(gh);
    sl.own[1][0].dir = perp(hh);
    if (!last) {
      sl.own[0][1].dir = along(hh);
      sl.own[1][1].dir = along(gh);
    }
    const double e[2][2] = {
        {to_double(plan.delta2[t]), to_double(plan.rates[t].r_a2)},
        {to_double(plan.delta1[t]), to_double(plan.rates[t].r_b2)}};
    double total = has_common ? P : 0.0;
    for (int u = 0; u < 2; ++u)
      for (int k = 0; k < 2; ++k)
        if (private_bits[u][k][t] > 0) total += scale(u, t) * std::pow(P, e[u][k]);
    const double kappa2 = total > 0 ? std::min(1.0, P / total) : 1.0;
    sl.c_gain = std::sqrt(kappa2) * rho;
    sl.c = sl.c_gain * cw(t);
    sl.x = sl.w * sl.c;
    for (int u = 0; u < 2; ++u)
      for (int k = 0; k < 2; ++k) {
        Stream& st = sl.own[u][k];
        st.bits = private_bits[u][k][t];
        if (st.bits == 0) continue;
        st.index = private_idx[u][k][t];
        st.power = kappa2 * scale(u, t) * std::pow(P, e[u][k]);
        st.amp = std::sqrt(st.power / grid_energy(st.bits));
        st.value = st.amp * qam_point(st.bits, st.index);
        sl.x += st.dir * st.value;
      }
    s.slots.push_back(sl);
  }
  return s;
}

std::array<std::vector<cplx>, 2> transmit_receive(const ChannelTrace& trace, const PhaseSignals& s,
                                                  int first_slot, std::uint64_t noise_seed,
                                                  double noise_var) {
  Rng rng(noise_seed);
  std::array<std::vector<cplx>, 2> y;
  for (std::size_t t = 0; t < s.slots.size(); ++t) {
    const int g = first_slot + static_cast<int>(t);
    const cplx z1 = cn(rng, noise_var);
    const cplx z2 = cn(rng, noise_var);
    y[0].push_back(tdot(trace.h[g], s.slots[t].x) + z1);
    y[1].push_back(tdot(trace.g[g], s.slots[t].x) + z2);
  }
  return y;
}

void quantize_value(cplx v, int bits, double range, std::uint32_t* idx_re, std::uint32_t* idx_im,
                    bool* clipped) {
  const int nb[2] = {(bits + 1) / 2, bits / 2};
  const double part[2] = {v.real(), v.imag()};
  std::uint32_t* idx[2] = {idx_re, idx_im};
  *clipped = false;
  for (int p = 0; p < 2; ++p) {
    const long N = 1L << nb[p];
    *idx[p] = 0;
    if (range <= 0.0) continue;
    if (nb[p] > 0 && std::fabs(part[p]) > range) *clipped = true;
    const double step = 2.0 * range / static_cast<double>(N);
    long i = static_cast<long>(std::floor((part[p] + range) / step));
    *idx[p] = static_cast<std::uint32_t>(std::clamp(i, 0L, N - 1));
  }
}

cplx dequantize(std::uint32_t idx_re, std::uint32_t idx_im, int bits, double range) {
  if (range <= 0.0) return {0.0, 0.0};
  const int nb[2] = {(bits + 1) / 2, bits / 2};
  const std::uint32_t idx[2] = {idx_re, idx_im};
  double out[2];
  for (int p = 0; p < 2; ++p) {
    const double step = 2.0 * range / static_cast<double>(1L << nb[p]);
    out[p] = -range + (static_cast<double>(idx[p]) + 0.5) * step;
  }
  return {out[0], out[1]};
}

InterferenceRecord quantize_interference(const ChannelTrace& trace, const CsitTrace& csit,
                                         const PhaseSignals& s, int first_slot,
                                         const std::array<std::vector<int>, 2>& bits,
                                         double range_factor) {
  InterferenceRecord rec;
  for (int u = 0; u < 2; ++u) {
    const int o = 1 - u;
    for (std::size_t t = 0; t < s.slots.size(); ++t) {
      const int g = first_slot + static_cast<int>(t);
      const Vec2& H = u == 0 ? trace.h[g] : trace.g[g];
      const Vec2& Hd = u == 0 ? csit.h_chk[g] : csit.g_chk[g];
      const SlotSignal& sl = s.slots[t];
      QuantizedSlot q;
      double V = 0.0;
      for (int k = 0; k < 2; ++k) {
        const Stream& st = sl.own[o][k];
        if (st.bits == 0) continue;
        q.iota += tdot(H, st.dir) * st.value;
        q.chk += tdot(Hd, st.dir) * st.value;
        V += std::norm(tdot(Hd, st.dir)) * st.power;
      }
      q.bits = bits[u][t];
      q.range = range_factor * std::sqrt(V / 2.0);
      std::uint32_t ir, ii;
      quantize_value(q.chk, q.bits, q.range, &ir, &ii, &q.clipped);
      q.bar = q.bits > 0 ? dequantize(ir, ii, q.bits, q.range) : cplx(0.0, 0.0);
      if (q.bits > 0 && q.range > 0.0) {
        const double sr = 2.0 * q.range / static_cast<double>(1L << ((q.bits + 1) / 2));
        const double si = 2.0 * q.range / static_cast<double>(1L << (q.bits / 2));
        q.noise_var = (sr * sr + si * si) / 12.0;
      } else {
        q.noise_var = V;
      }
      rec[u].push_back(q);
    }
  }
  return rec;
}

std::array<std::vector<int>, 2> nominal_quantizer_bits(const AllocationPlan& plan,
                                                       const ExponentProfile& phase, double P) {
  const double L = std::log2(P);
  std::array<std::vector<int>, 2> bits;
  for (int t = 0; t < plan.T; ++t) {
    bits[0].push_back(load_bits(pos(plan.delta1[t] - phase.alpha1[t]), L, 0));
    bits[1].push_back(load_bits(pos(plan.delta2[t] - phase.alpha2[t]), L, 0));
  }
  return bits;
}

void trim_to_capacity(std::array<std::vector<int>, 2>& bits, int capacity) {
  auto total = [&] {
    long s = 0;
    for (const auto& v : bits)
      for (int b : v) s += b;
    return s;
  };
  while (total() > capacity) {
    int* best = nullptr;
    for (auto& v : bits)
      for (int& b : v)
        if (!best || b > *best) best = &b;
    --*best;
  }
}

void validate_run_spec(const RunSpec& spec) {
  validate_profile(spec.profile);
  const int T = spec.phase_len > 0 ? spec.phase_len : spec.profile.n;
  if (spec.phases < 2) throw ValidationError("need at least two phases");
  if (spec.profile.eta > T) throw ValidationError("delayed CSIT lag exceeds the phase length");
  const ExponentAverages avg = averages(spec.profile);
  if (avg.a2 > avg.a1) throw ValidationError("profile users must be labeled (mean alpha2 <= mean alpha1)");
  for (int s = 0; s < spec.phases; ++s) {
    const ExponentAverages w = averages(profile_window(spec.profile, (s * T) % spec.profile.n, T));
    if (!(w == avg))
      throw ValidationError("phase " + std::to_string(s + 1) +
                            " averages differ from the long-term averages");
  }
  phase_budget(avg, spec.delta_bar, spec.omega);
}

SimResult simulate_run(const RunSpec& spec, double P, std::uint64_t seed) {
  validate_run_spec(spec);
  const int T = spec.phase_len > 0 ? spec.phase_len : spec.profile.n;
  const int S = spec.phases;
  const double L = std::log2(P);
  const SimOptions& opt = spec.options;

  auto make_common = [&](const Rational& dbs) {
    if (1 - dbs - opt.epsilon > 0) {
      try {
        return std::make_pair(build_code(T, dbs, opt.epsilon, P, opt.common_backoff_bits), true);
      } catch (const RateUnderflow&) {
      }
    }
    return std::make_pair(make_code(T, 0, 1.0), false);
  };

  std::vector<PhaseSetup> ph(S);
  for (int s = 0; s < S; ++s) {
    PhaseSetup& p = ph[s];
    p.window = profile_window(spec.profile, (s * T) % spec.profile.n, T);
    const bool last = s == S - 1;
    p.plan = last ? make_last_phase_plan(p.window) : make_plan(p.window, spec.delta_bar);
    std::tie(p.code, p.has_common) = make_common(p.plan.delta_bar);
    p.power_scale[0].assign(T, 1.0);
    p.power_scale[1].assign(T, 1.0);
    for (int t = 0; t < T; ++t) {
      const SlotRates& r = p.plan.rates[t];
      p.private_bits[0][0].push_back(load_bits(r.r_a, L, opt.private_backoff_bits));
      p.private_bits[0][1].push_back(last ? 0 : load_bits(r.r_a2, L, opt.private_backoff_bits));
      p.private_bits[1][0].push_back(load_bits(r.r_b, L, opt.private_backoff_bits));
      p.private_bits[1][1].push_back(last ? 0 : load_bits(r.r_b2, L, opt.private_backoff_bits));
    }
  }

  // Quantizer budgets of phase s ride on phase s+1's common code.
  std::vector<std::array<std::vector<int>, 2>> qbits(S);
  SimResult res;
  for (int s = 0; s + 1 < S; ++s) {
    qbits[s] = nominal_quantizer_bits(ph[s].plan, ph[s].window, P);
    for (const auto& v : qbits[s])
      for (int b : v) res.quant_bits_nominal += b;
    const auto nominal = qbits[s];
    if (s + 2 == S && ph[s + 1].has_common) {
      // The last phase only has to carry these bits; a lower rate costs nothing.
      long need = 0;
      for (const auto& v : nominal)
        for (int b : v) need += b;
      const int k = static_cast<int>((need + T - 1) / T);
      LatticeCode& last = ph[s + 1].code;
      if (k < last.bits_per_dim) {
        if (k < 1) {
          last = make_code(T, 0, 1.0);
          ph[s + 1].has_common = false;
        } else {
          last = make_code(T, k, last.theta);
        }
      }
    }
    trim_to_capacity(qbits[s], ph[s + 1].code.total_bits());
    for (const auto& v : qbits[s])
      for (int b : v) res.quant_bits_sent += b;
    // Quantizer bits that do not fit are paid for by the interfering streams:
    // their power drops by the trimmed amount and so do their loads.
    for (int u = 0; u < 2; ++u)
      for (int t = 0; t < T; ++t) {
        const int cut = nominal[u][t] - qbits[s][u][t];
        if (cut <= 0) continue;
        ph[s].power_scale[1 - u][t] = std::ldexp(1.0, -cut);
        for (int k = 0; k < 2; ++k) {
          int& x = ph[s].private_bits[1 - u][k][t];
          x = std::max(0, x - cut);
        }
      }
  }
  auto qsum = [&](int s) {
    int n = 0;
    for (const auto& v : qbits[s])
      for (int b : v) n += b;
    return n;
  };
  std::vector<PayloadLayout> layout(S);
  for (int s = 0; s < S; ++s) {
    PayloadLayout& lay = layout[s];
    const int C = ph[s].code.total_bits();
    lay.carried = s == 0 ? std::min(C, qsum(0)) : qsum(s - 1);
    const int free = C - lay.carried;
    if (s < S - 1) {
      lay.fresh[0] = static_cast<int>(std::floor(to_double(spec.omega) * free + 1e-9));
      lay.fresh[1] = free - lay.fresh[0];
    } else {
      lay.filler = free;
    }
  }

  const ChannelTrace trace = generate_channel(S * T, spec.channel, derive_seed(seed, 1));
  ExponentProfile expanded = profile_window(spec.profile, 0, S * T);
  const CsitTrace csit = generate_csit(trace, expanded, P, derive_seed(seed, 2));
  std::vector<Vec2> w;
  {
    Rng rng(derive_seed(seed, 3));
    for (int t = 0; t < S * T; ++t) {
      Vec2 v = cn2(rng, 1.0);
      w.push_back(v / v.norm());
    }
  }
  Rng bit_rng(derive_seed(seed, 4));
  std::uniform_int_distribution<int> coin(0, 1);

  std::vector<PhaseSignals> sig(S);
  std::vector<std::array<std::vector<cplx>, 2>> obs(S);
  std::vector<InterferenceRecord> rec(S);
  std::vector<std::vector<std::uint8_t>> qpayload(S);

  for (int s = 0; s < S; ++s) {
    const PhaseSetup& p = ph[s];
    std::vector<std::uint8_t> cb;
    if (s == 0) {
      for (int i = 0; i < layout[s].carried; ++i) cb.push_back(static_cast<std::uint8_t>(coin(bit_rng)));
    } else {
      cb = qpayload[s - 1];
    }
    while (static_cast<int>(cb.size()) < p.code.total_bits())
      cb.push_back(static_cast<std::uint8_t>(coin(bit_rng)));
    std::array<std::array<std::vector<std::uint32_t>, 2>, 2> idx;
    for (int u = 0; u < 2; ++u)
      for (int k = 0; k < 2; ++k)
        for (int t = 0; t < T; ++t) {
          const int nb = p.private_bits[u][k][t];
          std::uniform_int_distribution<std::uint32_t> pick(0, nb > 0 ? (1u << nb) - 1 : 0);
          idx[u][k].push_back(pick(bit_rng));
        }
    sig[s] = encode_phase(s, s == S - 1, p.plan, p.code, cb, idx, p.private_bits, csit, s * T, w, P,
                          p.power_scale);
    obs[s] = transmit_receive(trace, sig[s], s * T, derive_seed(seed, 5, static_cast<std::uint64_t>(s)));
    if (s < S - 1) {
      rec[s] = quantize_interference(trace, csit, sig[s], s * T, qbits[s], opt.range_factor);
      for (int u = 0; u < 2; ++u)
        for (int t = 0; t < T; ++t) {
          const QuantizedSlot& q = rec[s][u][t];
          std::uint32_t ir, ii;
          bool clip;
          quantize_value(q.chk, q.bits, q.range, &ir, &ii, &clip);
          put_bits(qpayload[s], ir, (q.bits + 1) / 2);
          put_bits(qpayload[s], ii, q.bits / 2);
          if (q.bits > 0) {
            ++res.quant_samples;
            res.clips += q.clipped ? 1 : 0;
            res.quant_noise_power += std::norm(q.chk - q.bar);
          }
        }
    }
  }

  // Backward decoding, independently at each receiver.
  res.slots_counted = static_cast<long long>(S - 1) * T;
  for (int u = 0; u < 2; ++u) {
    const int o = 1 - u;
    UserStats& us = res.user[u];
    res.common_ok[u].assign(S, false);
    res.private_ok[u].assign(S, false);
    bool chain = true;
    std::vector<std::uint8_t> next_common;  // decoded common bits of phase s+1
    for (int s = S - 1; s >= 0; --s) {
      const PhaseSetup& p = ph[s];
      const PhaseSignals& sg = sig[s];
      const bool last = s == S - 1;
      // Quantized interference of this phase, recovered from phase s+1.
      std::array<std::vector<cplx>, 2> bar;
      bar[0].assign(T, 0.0);
      bar[1].assign(T, 0.0);
      if (!last) {
        const std::vector<std::uint8_t>& src = opt.genie ? sig[s + 1].common_bits : next_common;
        std::size_t pos = 0;
        for (int v = 0; v < 2; ++v)
          for (int t = 0; t < T; ++t) {
            const QuantizedSlot& q = rec[s][v][t];
            const std::uint32_t ir = get_bits(src, pos, (q.bits + 1) / 2);
            const std::uint32_t ii = get_bits(src, pos, q.bits / 2);
            bar[v][t] = q.bits > 0 ? dequantize(ir, ii, q.bits, q.range) : cplx(0.0, 0.0);
          }
      }
      // Residual variance of the overheard interference after subtraction.
      std::vector<double> resid(T, 0.0);
      for (int t = 0; t < T; ++t) {
        const int g = s * T + t;
        const Vec2& H = u == 0 ? trace.h[g] : trace.g[g];
        const Vec2& Hd = u == 0 ? csit.h_chk[g] : csit.g_chk[g];
        for (int k = 0; k < 2; ++k) {
          const Stream& st = sg.slots[t].own[o][k];
          if (st.bits == 0) continue;
          const Vec2 err = last ? H : Vec2(H - Hd);
          resid[t] += std::norm(tdot(err, st.dir)) * st.power;
        }
        if (!last) resid[t] += rec[s][u][t].noise_var;
      }
      // Common symbols.
      Message chat(T, 0);
      if (p.has_common) {
        Eigen::VectorXcd ybar(T);
        std::vector<double> wts(T);
        for (int t = 0; t < T; ++t) {
          const int g = s * T + t;
          const Vec2& H = u == 0 ? trace.h[g] : trace.g[g];
          const SlotSignal& sl = sg.slots[t];
          const cplx gain = sl.c_gain * tdot(H, sl.w);
          double var = 1.0 + resid[t];
          for (int k = 0; k < 2; ++k)
            if (sl.own[u][k].bits > 0) var += std::norm(tdot(H, sl.own[u][k].dir)) * sl.own[u][k].power;
          ybar(t) = (obs[s][u][t] - bar[u][t]) / gain;
          wts[t] = std::norm(gain) / var;
          res.mi_proxy_bits += 0.5 * std::log2(1.0 + std::norm(gain) * mean_power(p.code) / var);
        }
        DecodeResult dr = decode_weighted(p.code, ybar, wts);
        chat = dr.message;
        us.search_truncated += dr.truncated ? 1 : 0;
        res.common_payload_bits += p.code.total_bits();
      }
      const bool cok = chat == sg.common;
      res.common_ok[u][s] = cok;
      ++us.common_decodes;
      us.common_failures += cok ? 0 : 1;
      chain = chain && cok;
      next_common = message_to_bits(p.code, chat);

      // Private symbols, slot by slot.
      long long good_bits = 0;
      bool all_ok = true;
      for (int t = 0; t < T; ++t) {
        const int g = s * T + t;
        const Vec2& H = u == 0 ? trace.h[g] : trace.g[g];
        const Vec2& Hdo = o == 0 ? csit.h_chk[g] : csit.g_chk[g];
        const SlotSignal& sl = sg.slots[t];
        std::vector<int> ks;
        for (int k = 0; k < 2; ++k)
          if (sl.own[u][k].bits > 0) ks.push_back(k);
        if (ks.empty()) continue;
        const Eigen::VectorXcd cw = encode(p.code, chat);
        const cplx r1 = obs[s][u][t] - sl.c_gain * tdot(H, sl.w) * cw(t) - bar[u][t];
        std::vector<std::uint32_t> est(2, 0);
        if (last) {
          const Stream& st = sl.own[u][0];
          est[0] = slice_index(r1 / (tdot(H, st.dir) * st.amp), st.bits);
        } else {
          // Rows: own observation and the other user's quantized interference.
          const double s1 = std::sqrt(1.0 + resid[t]);
          const double nv2 = rec[s][o][t].noise_var;
          const bool row2 = nv2 > 0.0;
          const int rows = row2 ? 2 : 1;
          const int n = static_cast<int>(ks.size());
          Eigen::MatrixXcd Hc(rows, n);
          Eigen::VectorXcd rc(rows);
          rc(0) = r1 / s1;
          for (int j = 0; j < n; ++j) {
            const Stream& st = sl.own[u][ks[j]];
            Hc(0, j) = tdot(H, st.dir) * st.amp / s1;
            if (row2) Hc(1, j) = tdot(Hdo, st.dir) * st.amp / std::sqrt(nv2);
          }
          if (row2) rc(1) = bar[o][t] / std::sqrt(nv2);
          Eigen::MatrixXd A(2 * rows, 2 * n);
          Eigen::VectorXd rr(2 * rows);
          A << Hc.real(), -Hc.imag(), Hc.imag(), Hc.real();
          rr << rc.real(), rc.imag();
          std::vector<int> levels(2 * n);
          for (int j = 0; j < n; ++j) {
            const int nb = sl.own[u][ks[j]].bits;
            levels[j] = 1 << ((nb + 1) / 2);
            levels[n + j] = 1 << (nb / 2);
          }
          SphereResult sr = sphere_decode(A, rr, levels, {}, opt.node_limit);
          us.search_truncated += sr.truncated ? 1 : 0;
          for (int j = 0; j < n; ++j)
            est[ks[j]] = qam_index(sl.own[u][ks[j]].bits, sr.levels[j], sr.levels[n + j]);
        }
        for (int k : ks) {
          const Stream& st = sl.own[u][k];
          ++us.private_symbols;
          const bool ok = est[k] == st.index;
          us.private_symbol_errors += ok ? 0 : 1;
          all_ok = all_ok && ok;
          good_bits += correct_bits(est[k], st.index, st.bits);
          if (!last) us.offered_bits += st.bits;
        }
      }
      res.private_ok[u][s] = all_ok;
      if (!last) {
        us.offered_bits += layout[s].fresh[u];
        if (chain) us.delivered_bits += good_bits + layout[s].fresh[u];
        for (int t = 0; t < T; ++t) {
          if (rec[s][u][t].bits == 0) continue;
          us.residual_power += std::norm(rec[s][u][t].iota - bar[u][t]);
          ++us.residual_samples;
        }
      }
    }
  }
  return res;
}

}  // namespace miso
