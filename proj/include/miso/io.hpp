/**
 * @file io.hpp
 * @brief JSON and CSV readers/writers. Rationals are written as "p/q" strings,
 * floats with 12 significant digits, JSON keys sorted.
 */
#pragma once

#include <string>

#include "json.hpp"
#include "miso/allocation.hpp"
#include "miso/harness.hpp"
#include "miso/lattice.hpp"
#include "miso/region.hpp"

namespace miso::io {

using json = nlohmann::json;

/// Rational from a JSON number or string. Floats go through rational_from_double.
Rational rational_from_json(const json& j);
json to_json(const Rational& r);

/// Rounds to 12 significant digits so dumps are short and stable.
double round12(double x);
std::string fmt_double(double x);

ExponentProfile profile_from_json(const json& j);
json profile_to_json(const ExponentProfile& p);
ExponentAverages averages_from_json(const json& j);
json averages_to_json(const ExponentAverages& a);

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);

/// Region report: case, tightness, corners, (delta_bar, omega) table, polygons.
json region_report(const ExponentAverages& a);
std::string region_csv(const DofRegion& r);

std::string plan_csv(const AllocationPlan& p);
json budget_to_json(const PhaseBudget& b);

json report_to_json(const RateReport& r);
/// Columns snr_db,user,bits_per_slot,failures.
std::string report_csv(const RateReport& r);
std::string verdict_csv(const std::vector<Verdict>& v);

json sim_result_to_json(const SimResult& r);

json lattice_cert(int T, int bits_per_dim, double theta);

std::string read_file(const std::string& path);
/// Writes bytes verbatim (LF line endings), creating parent directories.
void write_file(const std::string& path, const std::string& data);
/// dump(2) plus a trailing newline.
std::string dump(const json& j);

}  // namespace miso::io
