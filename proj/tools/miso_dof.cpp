/**
 * @file miso_dof.cpp
 * @brief Command-line front end: region, plan, allocate, simulate, sweep,
 * lattice-cert. Exit code 2 on validation errors, 3 on infeasibility.
 */
#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "miso/errors.hpp"
#include "miso/io.hpp"

using namespace miso;
using io::json;

namespace {

json load_config(const std::string& path) {
  if (path.empty()) throw ValidationError("--config is required");
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("bad JSON in ") + path + ": " + e.what());
  }
}

void emit(const std::string& out, const std::string& name, const std::string& data) {
  if (out.empty()) {
    std::cout << data;
  } else {
    io::write_file(out + "/" + name, data);
  }
}

int cmd_region(const std::string& cfg, const std::string& out) {
  const json j = load_config(cfg);
  const ExponentAverages a = io::averages_from_json(j.contains("averages") ? j["averages"] : j);
  const json rep = io::region_report(a);
  const auto reg = optimal_region(a);
  const DofRegion& poly =
      std::holds_alternative<DofRegion>(reg) ? std::get<DofRegion>(reg) : std::get<NotTight>(reg).inner;
  emit(out, "region.csv", io::region_csv(poly));
  emit(out, "region.json", io::dump(rep));
  return 0;
}

DelayConstraint parse_constraint(const json& j) {
  DelayConstraint c;
  if (j.is_null()) return c;
  const std::string k = j.at("kind").get<std::string>();
  if (k == "None") {
    c.kind = DelayConstraint::None;
  } else if (k == "AlphaMax") {
    c.kind = DelayConstraint::AlphaMax;
    c.value = io::rational_from_json(j.at("value"));
  } else if (k == "BetaMax") {
    c.kind = DelayConstraint::BetaMax;
    c.value = io::rational_from_json(j.at("value"));
  } else {
    throw ValidationError("unknown delay constraint " + k);
  }
  return c;
}

int cmd_plan(const std::string& cfg, const std::string& out) {
  const json j = load_config(cfg);
  json rep;
  if (j.contains("d")) {
    const Rational d = io::rational_from_json(j["d"]);
    json opts = json::array();
    for (const auto& o : sufficient_feedback(d))
      opts.push_back(json{{"kind", o.kind},
                          {"alpha_bar_min", io::to_json(o.alpha_bar_min)},
                          {"second_min", io::to_json(o.second_min)}});
    rep["d"] = io::to_json(d);
    rep["sufficient_feedback"] = opts;
    const DelayConstraint c = parse_constraint(j.contains("constraint") ? j["constraint"] : json());
    rep["allowable_delay"] = io::to_json(allowable_delay(d, c));
    rep["allowable_delay_ambiguous"] = allowable_delay_ambiguous(c);
  }
  if (j.contains("averages")) {
    const ExponentAverages a = io::averages_from_json(j["averages"]);
    const auto lab = label_users(a).first;
    rep["threshold"] = io::to_json(imperfect_delayed_threshold(lab));
    rep["symmetry_gain"] = io::to_json(symmetry_gain(a.a1, a.a2));
  }
  if (rep.is_null()) throw ValidationError("plan config needs \"d\" and/or \"averages\"");
  emit(out, "plan.json", io::dump(rep));
  return 0;
}

int cmd_allocate(const std::string& cfg, const std::string& out) {
  const json j = load_config(cfg);
  ExponentProfile p = io::profile_from_json(j.at("profile"));
  if (averages(p).a2 > averages(p).a1) p = swap_users(p);
  const Rational db = io::rational_from_json(j.at("delta_bar"));
  const Rational om = j.contains("omega") ? io::rational_from_json(j["omega"]) : Rational(0);
  const int T = j.value("phase_len", p.n);
  const AllocationPlan plan = make_plan(profile_window(p, 0, T), db);
  json b = io::budget_to_json(phase_budget(averages(p), db, om));
  emit(out, "allocate.csv", io::plan_csv(plan));
  emit(out, "budget.json", io::dump(b));
  return 0;
}

int cmd_simulate(const std::string& cfg, const std::string& out, const std::string& profile,
                 const std::vector<double>& snr, int phases, int phase_len, std::uint64_t seed,
                 const std::string& eps) {
  json j = cfg.empty() ? json::object() : load_config(cfg);
  if (!profile.empty()) j["profile"] = json::parse(io::read_file(profile));
  if (!snr.empty()) j["snr_db"] = snr;
  if (phases > 0) j["phases"] = phases;
  if (phase_len > 0) j["phase_len"] = phase_len;
  if (seed > 0) j["seed"] = seed;
  if (!eps.empty()) j["epsilon"] = eps;
  if (!j.contains("corner") && !j.contains("delta_bar")) throw ValidationError("need a corner or delta_bar");
  const ExperimentConfig c = io::config_from_json(j);
  bool swapped = false;
  RunSpec spec;
  spec.profile = c.profile;
  if (averages(spec.profile).a2 > averages(spec.profile).a1) {
    spec.profile = swap_users(spec.profile);
    swapped = true;
  }
  std::tie(spec.delta_bar, spec.omega) = resolve_params(c);
  spec.phases = c.phases;
  spec.phase_len = c.phase_len;
  spec.channel = c.channel;
  spec.options = c.options;
  json runs = json::array();
  std::string csv = "snr_db,user,delivered_bits,slots,bits_per_slot,common_failures,private_symbol_errors\n";
  for (std::size_t i = 0; i < c.snr_db.size(); ++i) {
    const double P = std::pow(10.0, c.snr_db[i] / 10.0);
    const SimResult r = simulate_run(spec, P, derive_seed(c.seed, i, 0));
    json rj = io::sim_result_to_json(r);
    rj["snr_db"] = io::round12(c.snr_db[i]);
    rj["users_swapped"] = swapped;
    runs.push_back(rj);
    for (int u = 0; u < 2; ++u)
      csv += io::fmt_double(c.snr_db[i]) + "," + std::to_string(u + 1) + "," +
             std::to_string(r.user[u].delivered_bits) + "," + std::to_string(r.slots_counted) + "," +
             io::fmt_double(static_cast<double>(r.user[u].delivered_bits) / r.slots_counted) + "," +
             std::to_string(r.user[u].common_failures) + "," +
             std::to_string(r.user[u].private_symbol_errors) + "\n";
  }
  emit(out, "simulate.json", io::dump(runs));
  emit(out, "simulate.csv", csv);
  return 0;
}

int cmd_sweep(const std::string& cfg, const std::string& out) {
  const ExperimentConfig c = io::config_from_json(load_config(cfg));
  const RateReport r = run_experiment(c);
  emit(out, "report.json", io::dump(io::report_to_json(r)));
  emit(out, "report.csv", io::report_csv(r));
  emit(out, "verdict.csv", io::verdict_csv(compare(r, c.tolerance)));
  return 0;
}

int cmd_lattice(const std::string& cfg, const std::string& out, const std::vector<int>& Ts, int bits,
                const std::vector<double>& thetas) {
  std::vector<int> ts = Ts;
  std::vector<double> th = thetas;
  if (!cfg.empty()) {
    const json j = load_config(cfg);
    ts = j.value("T", ts);
    bits = j.value("bits_per_dim", bits);
    th = j.value("theta", th);
  }
  json rows = json::array();
  for (int T : ts)
    for (double t : th) rows.push_back(io::lattice_cert(T, bits, t));
  emit(out, "lattice_cert.json", io::dump(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DoF planner and phase-Markov simulator for the two-user MISO broadcast channel"};
  app.require_subcommand(1);
  std::string cfg, out;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", cfg, "JSON config file");
    s->add_option("--out", out, "output directory (stdout when omitted)");
  };
  auto* region = app.add_subcommand("region", "DoF region, corners and scheme parameters");
  auto* plan = app.add_subcommand("plan", "feedback sufficiency, allowable delay, symmetry gain");
  auto* alloc = app.add_subcommand("allocate", "per-slot power exponents and phase budget");
  auto* sim = app.add_subcommand("simulate", "run the scheme at a list of SNR points");
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep with slope fitting");
  auto* lat = app.add_subcommand("lattice-cert", "product-distance certificate of the common codes");
  for (auto* s : {region, plan, alloc, sim, sweep, lat}) common(s);

  std::string profile, eps;
  std::vector<double> snr;
  int phases = 0, phase_len = 0;
  std::uint64_t seed = 0;
  sim->add_option("--profile", profile, "profile JSON file");
  sim->add_option("--snr-db", snr, "SNR points in dB")->delimiter(',');
  sim->add_option("--phases", phases, "number of phases S");
  sim->add_option("--phase-len", phase_len, "phase length T");
  sim->add_option("--seed", seed, "run seed");
  sim->add_option("--epsilon", eps, "common-code rate back-off");

  std::vector<int> Ts{1, 2, 3, 4};
  std::vector<double> thetas{1.0};
  int bits = 2;
  lat->add_option("--T", Ts, "code lengths")->delimiter(',');
  lat->add_option("--bits", bits, "bits per complex dimension");
  lat->add_option("--theta", thetas, "scalings")->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    if (region->parsed()) return cmd_region(cfg, out);
    if (plan->parsed()) return cmd_plan(cfg, out);
    if (alloc->parsed()) return cmd_allocate(cfg, out);
    if (sim->parsed()) return cmd_simulate(cfg, out, profile, snr, phases, phase_len, seed, eps);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
    if (lat->parsed()) return cmd_lattice(cfg, out, Ts, bits, thetas);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
