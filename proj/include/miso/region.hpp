/**
 * @file region.hpp
 * @brief DoF polygons, corner points and feedback-planning rules, all in exact
 * rational arithmetic.
 */
#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "miso/exponents.hpp"
#include "miso/rational.hpp"

namespace miso {

struct DofPoint {
  Rational d1, d2;
  bool operator==(const DofPoint&) const = default;
};

enum class RegionKind { Inner, Outer, Optimal };

const char* to_string(RegionKind k);

/// Convex polygon, vertices counterclockwise from (0,0). labels[k] names the
/// corner(s) sitting on vertices[k] ("" when unnamed, "BE" when merged).
struct DofRegion {
  std::vector<DofPoint> vertices;
  std::vector<std::string> labels;
  RegionKind kind = RegionKind::Inner;
};

/// Returned when the delayed-CSIT condition fails: only bounds are known.
struct NotTight {
  DofRegion inner;
  DofRegion outer;
  Rational threshold;
  Rational min_beta;
};

/// a*d1 + b*d2 <= c
struct Halfplane {
  Rational a, b, c;
};

/// Exact intersection of halfplanes (must be bounded and contain the origin).
std::vector<DofPoint> intersect_halfplanes(const std::vector<Halfplane>& hs);

DofRegion inner_region(const ExponentAverages& a);
DofRegion outer_region(const ExponentAverages& a);
std::variant<DofRegion, NotTight> optimal_region(const ExponentAverages& a);

/// Case 1 when 2*a1 - a2 < 1, case 2 otherwise (labeled averages).
int corner_case(const ExponentAverages& a);

struct CornerSet {
  int case_id = 1;
  bool tight = false;
  std::map<char, DofPoint> points;  ///< A..G by formula
  std::string active;               ///< corners of the region the scheme attains
};

/// All named corner points. E, F, G use min(b1, b2). Requires a2 <= a1.
CornerSet corner_points(const ExponentAverages& a);

/// (delta_bar, omega) attaining an active corner.
std::pair<Rational, Rational> scheme_params_for_corner(const ExponentAverages& a, char corner);

Rational imperfect_delayed_threshold(const ExponentAverages& a);
Rational symmetry_gain(const Rational& a1, const Rational& a2);
Rational max_sum_dof(const DofRegion& r);
bool region_contains(const DofRegion& r, const DofPoint& p);

struct FeedbackOption {
  std::string kind;       ///< "delayed" or "current_at_Tc"
  Rational alpha_bar_min; ///< lower bound on the average current quality
  Rational second_min;    ///< bound on beta ("delayed") or alpha_Tc
};

/// Two sufficient periodic-feedback designs for symmetric DoF d.
std::vector<FeedbackOption> sufficient_feedback(const Rational& d);

struct DelayConstraint {
  enum Kind { None, AlphaMax, BetaMax } kind = None;
  Rational value{0};
};

/// Largest fraction gamma of the coherence period that may pass without
/// current feedback while keeping symmetric DoF d.
Rational allowable_delay(const Rational& d, const DelayConstraint& c);

/// True when the BetaMax rule is used with beta_max < 1/3, where sub-ranges
/// are not fully stated.
bool allowable_delay_ambiguous(const DelayConstraint& c);

DofPoint mirror(const DofPoint& p);

}  // namespace miso
