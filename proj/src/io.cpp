/**
 * @file io.cpp
 */
#include "miso/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "miso/errors.hpp"

namespace miso::io {

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return rational_from_double(j.get<double>());
  throw ValidationError("expected a number or \"p/q\" string, got " + j.dump());
}

json to_json(const Rational& r) { return to_string(r); }

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::vector<Rational> rvec(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ValidationError(std::string("missing array ") + key);
  std::vector<Rational> v;
  for (const auto& x : j[key]) v.push_back(rational_from_json(x));
  return v;
}

json jvec(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

json point_json(const DofPoint& p) { return json{{"d1", to_json(p.d1)}, {"d2", to_json(p.d2)}}; }

json region_json(const DofRegion& r) {
  json v = json::array();
  for (std::size_t k = 0; k < r.vertices.size(); ++k) {
    json p = point_json(r.vertices[k]);
    p["label"] = r.labels[k];
    v.push_back(p);
  }
  return json{{"kind", to_string(r.kind)}, {"vertices", v}, {"max_sum_dof", to_json(max_sum_dof(r))}};
}

template <class T>
T get_or(const json& j, const char* key, T dflt) {
  return j.contains(key) ? j[key].get<T>() : dflt;
}

}  // namespace

ExponentProfile profile_from_json(const json& j) {
  if (j.contains("kind")) {
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "mat") return make_mat_profile(get_or<int>(j, "periods", 1));
    if (kind == "constant")
      return make_constant_profile(j.at("n").get<int>(), rational_from_json(j.at("alpha")),
                                   rational_from_json(j.at("beta")));
    if (kind == "periodic") {
      auto spec = [](const json& s) {
        PeriodicFeedbackSpec p;
        p.Tc = s.at("Tc").get<int>();
        for (const auto& e : s.at("events"))
          p.events.emplace_back(e.at(0).get<int>(), rational_from_json(e.at(1)));
        if (s.contains("delayed_extra")) p.delayed_extra = rational_from_json(s["delayed_extra"]);
        return p;
      };
      const int periods = get_or<int>(j, "periods", 1);
      if (j.contains("user2")) return make_periodic_profile(spec(j.at("user1")), spec(j["user2"]), periods);
      return make_periodic_profile(spec(j.at("user1")), periods);
    }
    throw ValidationError("unknown profile kind " + kind);
  }
  ExponentProfile p;
  p.alpha1 = rvec(j, "alpha1");
  p.alpha2 = rvec(j, "alpha2");
  p.beta1 = rvec(j, "beta1");
  p.beta2 = rvec(j, "beta2");
  p.n = get_or<int>(j, "n", static_cast<int>(p.alpha1.size()));
  p.eta = get_or<int>(j, "eta", 0);
  return validate_profile(p);
}

json profile_to_json(const ExponentProfile& p) {
  return json{{"n", p.n},
              {"eta", p.eta},
              {"alpha1", jvec(p.alpha1)},
              {"alpha2", jvec(p.alpha2)},
              {"beta1", jvec(p.beta1)},
              {"beta2", jvec(p.beta2)}};
}

ExponentAverages averages_from_json(const json& j) {
  if (j.contains("alpha1")) return averages(profile_from_json(j));
  ExponentAverages a{rational_from_json(j.at("a1")), rational_from_json(j.at("a2")),
                     rational_from_json(j.at("b1")), rational_from_json(j.at("b2"))};
  validate_averages(a);
  return a;
}

json averages_to_json(const ExponentAverages& a) {
  return json{{"a1", to_json(a.a1)}, {"a2", to_json(a.a2)}, {"b1", to_json(a.b1)}, {"b2", to_json(a.b2)}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (!j.contains("profile")) throw ValidationError("config needs a profile");
  c.profile = profile_from_json(j["profile"]);
  if (j.contains("corner")) {
    const std::string s = j["corner"].get<std::string>();
    if (s.size() != 1 || s[0] < 'A' || s[0] > 'G') throw ValidationError("corner must be one of A..G");
    c.corner = s[0];
  } else {
    if (!j.contains("delta_bar") || !j.contains("omega"))
      throw ValidationError("config needs a corner or delta_bar and omega");
    c.delta_bar = rational_from_json(j["delta_bar"]);
    c.omega = rational_from_json(j["omega"]);
  }
  if (j.contains("snr_db")) c.snr_db = j["snr_db"].get<std::vector<double>>();
  c.phases = get_or<int>(j, "phases", c.phases);
  c.phase_len = get_or<int>(j, "phase_len", c.phase_len);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.trials = get_or<int>(j, "trials", c.trials);
  c.tolerance = get_or<double>(j, "tolerance", c.tolerance);
  c.threads = get_or<int>(j, "threads", c.threads);
  if (j.contains("epsilon")) c.options.epsilon = rational_from_json(j["epsilon"]);
  c.options.range_factor = get_or<double>(j, "range_factor", c.options.range_factor);
  c.options.common_backoff_bits = get_or<int>(j, "common_backoff_bits", c.options.common_backoff_bits);
  c.options.private_backoff_bits = get_or<int>(j, "private_backoff_bits", c.options.private_backoff_bits);
  c.options.node_limit = get_or<std::uint64_t>(j, "node_limit", c.options.node_limit);
  c.options.genie = get_or<bool>(j, "genie", c.options.genie);
  if (j.contains("channel")) {
    const json& ch = j["channel"];
    const std::string m = get_or<std::string>(ch, "model", "iid");
    if (m == "iid") {
      c.channel.kind = ChannelModel::Iid;
    } else if (m == "block") {
      c.channel.kind = ChannelModel::Block;
      c.channel.Tc = get_or<int>(ch, "Tc", 1);
    } else {
      throw ValidationError("unknown channel model " + m);
    }
  }
  if (c.phases < 2) throw ValidationError("phases must be at least 2");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["profile"] = profile_to_json(c.profile);
  if (c.corner) {
    j["corner"] = std::string(1, *c.corner);
  } else {
    j["delta_bar"] = to_json(c.delta_bar);
    j["omega"] = to_json(c.omega);
  }
  json snr = json::array();
  for (double s : c.snr_db) snr.push_back(round12(s));
  j["snr_db"] = snr;
  j["phases"] = c.phases;
  j["phase_len"] = c.phase_len;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["tolerance"] = round12(c.tolerance);
  j["threads"] = c.threads;
  j["epsilon"] = to_json(c.options.epsilon);
  j["range_factor"] = round12(c.options.range_factor);
  j["common_backoff_bits"] = c.options.common_backoff_bits;
  j["private_backoff_bits"] = c.options.private_backoff_bits;
  j["node_limit"] = c.options.node_limit;
  j["genie"] = c.options.genie;
  j["channel"] = c.channel.kind == ChannelModel::Block
                     ? json{{"model", "block"}, {"Tc", c.channel.Tc}}
                     : json{{"model", "iid"}};
  return j;
}

json region_report(const ExponentAverages& input) {
  validate_averages(input);
  const auto [a, swapped] = label_users(input);
  json j;
  j["averages"] = averages_to_json(input);
  j["users_swapped"] = swapped;
  const CornerSet cs = corner_points(a);
  j["case"] = cs.case_id;
  j["tight"] = cs.tight;
  j["threshold"] = to_json(imperfect_delayed_threshold(a));
  j["min_beta"] = to_json(rmin(a.b1, a.b2));
  json corners = json::object();
  for (const auto& [k, p] : cs.points) corners[std::string(1, k)] = point_json(p);
  j["corners"] = corners;
  j["active"] = cs.active;
  json table = json::array();
  for (char k : cs.active) {
    const auto [db, om] = scheme_params_for_corner(a, k);
    json row{{"corner", std::string(1, k)}, {"delta_bar", to_json(db)}, {"omega", to_json(om)}};
    row["dof"] = point_json(dof_from_params(a, db, om));
    table.push_back(row);
  }
  j["scheme_params"] = table;
  const auto reg = optimal_region(input);
  if (const auto* r = std::get_if<DofRegion>(&reg)) {
    j["region"] = region_json(*r);
  } else {
    const auto& nt = std::get<NotTight>(reg);
    j["inner"] = region_json(nt.inner);
    j["outer"] = region_json(nt.outer);
  }
  return j;
}

std::string region_csv(const DofRegion& r) {
  std::string s = "d1,d2,label\n";
  for (std::size_t k = 0; k < r.vertices.size(); ++k)
    s += to_string(r.vertices[k].d1) + "," + to_string(r.vertices[k].d2) + "," + r.labels[k] + "\n";
  return s;
}

std::string plan_csv(const AllocationPlan& p) {
  std::string s = "t,delta1,delta2,r_a,r_a',r_b,r_b'\n";
  for (int t = 0; t < p.T; ++t) {
    const SlotRates& r = p.rates[t];
    s += std::to_string(t + 1) + "," + to_string(p.delta1[t]) + "," + to_string(p.delta2[t]) + "," +
         to_string(r.r_a) + "," + to_string(r.r_a2) + "," + to_string(r.r_b) + "," +
         to_string(r.r_b2) + "\n";
  }
  return s;
}

json budget_to_json(const PhaseBudget& b) {
  return json{{"private1", to_json(b.private1)}, {"private2", to_json(b.private2)},
              {"common", to_json(b.common)},     {"quantized", to_json(b.quantized)},
              {"delta_com", to_json(b.delta_com)}, {"omega", to_json(b.omega)}};
}

json report_to_json(const RateReport& r) {
  json j;
  j["averages"] = averages_to_json(r.averages);
  j["users_swapped"] = r.users_swapped;
  j["delta_bar"] = to_json(r.delta_bar);
  j["omega"] = to_json(r.omega);
  j["corner"] = r.corner;
  j["predicted"] = point_json(r.predicted);
  j["tight"] = r.tight;
  json pts = json::array();
  for (const auto& p : r.points) {
    json q;
    q["snr_db"] = round12(p.snr_db);
    q["log2P"] = round12(p.log2P);
    q["slots"] = p.slots;
    q["search_truncated"] = p.search_truncated;
    q["quant_samples"] = p.quant_samples;
    q["clips"] = p.clips;
    q["quant_noise_power"] = round12(p.quant_samples ? p.quant_noise_power / p.quant_samples : 0.0);
    json users = json::array();
    for (int u = 0; u < 2; ++u)
      users.push_back(json{
          {"delivered_bits", p.delivered_bits[u]},
          {"bits_per_slot", round12(p.bits_per_slot(u))},
          {"common_failures", p.common_failures[u]},
          {"private_symbols", p.private_symbols[u]},
          {"private_symbol_errors", p.private_symbol_errors[u]},
          {"residual_power",
           round12(p.residual_samples[u] ? p.residual_power[u] / p.residual_samples[u] : 0.0)}});
    q["users"] = users;
    pts.push_back(q);
  }
  j["points"] = pts;
  json fits = json::array();
  for (int u = 0; u < 2; ++u)
    fits.push_back(json{{"slope", round12(r.fit[u].slope)},
                        {"intercept", round12(r.fit[u].intercept)},
                        {"residual", round12(r.fit[u].residual)}});
  j["fit"] = fits;
  return j;
}

std::string report_csv(const RateReport& r) {
  std::string s = "snr_db,user,bits_per_slot,failures\n";
  for (const auto& p : r.points)
    for (int u = 0; u < 2; ++u)
      s += fmt_double(p.snr_db) + "," + std::to_string(u + 1) + "," + fmt_double(p.bits_per_slot(u)) +
           "," + std::to_string(p.common_failures[u]) + "\n";
  return s;
}

std::string verdict_csv(const std::vector<Verdict>& v) {
  std::string s = "user,predicted,measured,diff,pass,note\n";
  for (const auto& x : v)
    s += std::to_string(x.user + 1) + "," + fmt_double(x.predicted) + "," + fmt_double(x.measured) +
         "," + fmt_double(x.diff) + "," + (x.pass ? "pass" : "fail") + "," + x.note + "\n";
  return s;
}

json sim_result_to_json(const SimResult& r) {
  json j;
  j["slots_counted"] = r.slots_counted;
  j["quant_samples"] = r.quant_samples;
  j["clips"] = r.clips;
  j["quant_noise_power"] = round12(r.quant_samples ? r.quant_noise_power / r.quant_samples : 0.0);
  j["quant_bits_nominal"] = r.quant_bits_nominal;
  j["quant_bits_sent"] = r.quant_bits_sent;
  j["mi_proxy_bits"] = round12(r.mi_proxy_bits);
  j["common_payload_bits"] = r.common_payload_bits;
  json users = json::array();
  for (int u = 0; u < 2; ++u) {
    const UserStats& s = r.user[u];
    json cok = json::array(), pok = json::array();
    for (bool b : r.common_ok[u]) cok.push_back(b);
    for (bool b : r.private_ok[u]) pok.push_back(b);
    users.push_back(json{
        {"delivered_bits", s.delivered_bits},
        {"offered_bits", s.offered_bits},
        {"private_symbols", s.private_symbols},
        {"private_symbol_errors", s.private_symbol_errors},
        {"common_decodes", s.common_decodes},
        {"common_failures", s.common_failures},
        {"search_truncated", s.search_truncated},
        {"residual_power", round12(s.residual_samples ? s.residual_power / s.residual_samples : 0.0)},
        {"common_ok", cok},
        {"private_ok", pok}});
  }
  j["users"] = users;
  return j;
}

json lattice_cert(int T, int bits_per_dim, double theta) {
  const LatticeCode code = make_code(T, bits_per_dim, theta);
  json j;
  j["T"] = T;
  j["q"] = code.q();
  j["theta"] = round12(theta);
  j["min_product_distance"] = round12(min_product_distance(code));
  j["unitarity_residual"] = round12(unitarity_residual(code.M));
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << data;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace miso::io
