/**
 * @file harness.cpp
 */
#include "miso/harness.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "miso/allocation.hpp"
#include "miso/errors.hpp"

namespace miso {

SlopeFit fit_dof_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DegenerateGrid("slope fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DegenerateGrid("non-finite grid point");
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) throw DegenerateGrid("slope fit needs distinct abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (const auto& [x, y] : points) {
    const double e = y - (f.intercept + f.slope * x);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

ExponentProfile swap_users(const ExponentProfile& p) {
  ExponentProfile q = p;
  std::swap(q.alpha1, q.alpha2);
  std::swap(q.beta1, q.beta2);
  return q;
}

namespace {

ExponentProfile labeled_profile(const ExperimentConfig& cfg, bool* swapped) {
  const ExponentAverages a = averages(validate_profile(cfg.profile));
  *swapped = a.a2 > a.a1;
  return *swapped ? swap_users(cfg.profile) : cfg.profile;
}

}  // namespace

std::pair<Rational, Rational> resolve_params(const ExperimentConfig& cfg) {
  bool swapped = false;
  const ExponentAverages a = averages(labeled_profile(cfg, &swapped));
  if (cfg.corner) return scheme_params_for_corner(a, *cfg.corner);
  return {cfg.delta_bar, cfg.omega};
}

RateReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.snr_db.empty()) throw ValidationError("empty SNR grid");
  for (std::size_t i = 1; i < cfg.snr_db.size(); ++i)
    if (!(cfg.snr_db[i] > cfg.snr_db[i - 1])) throw ValidationError("SNR grid must be strictly increasing");
  if (cfg.trials < 1) throw ValidationError("trials must be positive");

  RateReport rep;
  RunSpec spec;
  spec.profile = labeled_profile(cfg, &rep.users_swapped);
  rep.averages = averages(spec.profile);
  std::tie(rep.delta_bar, rep.omega) = resolve_params(cfg);
  rep.corner = cfg.corner ? std::string(1, *cfg.corner) : std::string();
  spec.delta_bar = rep.delta_bar;
  spec.omega = rep.omega;
  spec.phases = cfg.phases;
  spec.phase_len = cfg.phase_len;
  spec.channel = cfg.channel;
  spec.options = cfg.options;
  validate_run_spec(spec);
  rep.predicted = dof_from_params(rep.averages, rep.delta_bar, rep.omega);
  rep.tight = std::holds_alternative<DofRegion>(optimal_region(rep.averages));

  const int np = static_cast<int>(cfg.snr_db.size());
  const int jobs = np * cfg.trials;
  std::vector<SimResult> out(jobs);
  std::vector<std::exception_ptr> err(jobs);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int j = next++; j < jobs; j = next++) {
      const int i = j / cfg.trials, k = j % cfg.trials;
      const double P = std::pow(10.0, cfg.snr_db[i] / 10.0);
      try {
        out[j] = simulate_run(spec, P, derive_seed(cfg.seed, static_cast<std::uint64_t>(i),
                                                   static_cast<std::uint64_t>(k)));
      } catch (...) {
        err[j] = std::current_exception();
      }
    }
  };
  int nt = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::max(1, std::min(nt, jobs));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);

  // Fixed-order aggregation keeps reports independent of scheduling.
  for (int i = 0; i < np; ++i) {
    RatePoint pt;
    pt.snr_db = cfg.snr_db[i];
    pt.log2P = cfg.snr_db[i] / 10.0 * std::log2(10.0);
    for (int k = 0; k < cfg.trials; ++k) {
      const SimResult& r = out[i * cfg.trials + k];
      pt.slots += r.slots_counted;
      pt.quant_samples += r.quant_samples;
      pt.clips += r.clips;
      pt.quant_noise_power += r.quant_noise_power;
      for (int u = 0; u < 2; ++u) {
        const UserStats& s = r.user[u];
        pt.delivered_bits[u] += s.delivered_bits;
        pt.common_failures[u] += s.common_failures;
        pt.private_symbol_errors[u] += s.private_symbol_errors;
        pt.private_symbols[u] += s.private_symbols;
        pt.search_truncated += s.search_truncated;
        pt.residual_power[u] += s.residual_power;
        pt.residual_samples[u] += s.residual_samples;
      }
    }
    rep.points.push_back(pt);
  }
  if (np >= 3) {
    for (int u = 0; u < 2; ++u) {
      std::vector<std::pair<double, double>> xy;
      for (const auto& pt : rep.points) xy.emplace_back(pt.log2P, pt.bits_per_slot(u));
      rep.fit[u] = fit_dof_slope(xy);
    }
  }
  return rep;
}

std::vector<Verdict> compare(const RateReport& report, double tolerance) {
  std::vector<Verdict> v;
  const Rational pred[2] = {report.predicted.d1, report.predicted.d2};
  for (int u = 0; u < 2; ++u) {
    Verdict x;
    x.user = u;
    x.predicted = to_double(pred[u]);
    x.measured = report.fit[u].slope;
    x.diff = std::fabs(x.measured - x.predicted);
    x.pass = x.diff <= tolerance;
    if (!report.tight) x.note = "bounds only";
    v.push_back(x);
  }
  return v;
}

}  // namespace miso
