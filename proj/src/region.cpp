/**
 * @file region.cpp
 */
#include "miso/region.hpp"

#include <algorithm>

#include "miso/errors.hpp"

namespace miso {

namespace {

Rational cross(const DofPoint& p, const DofPoint& q) { return p.d1 * q.d2 - p.d2 * q.d1; }

bool satisfies(const Halfplane& h, const DofPoint& p) { return h.a * p.d1 + h.b * p.d2 <= h.c; }

std::vector<Halfplane> outer_constraints(const ExponentAverages& a) {
  return {{-1, 0, 0}, {0, -1, 0}, {1, 0, 1}, {0, 1, 1}, {2, 1, 2 + a.a1}, {1, 2, 2 + a.a2}};
}

std::vector<Halfplane> inner_constraints(const ExponentAverages& a) {
  auto hs = outer_constraints(a);
  hs.push_back({1, 1, 1 + rmin(a.b1, a.b2)});
  return hs;
}

std::string table_corners(const ExponentAverages& a, bool inner) {
  const Rational m = rmin(a.b1, a.b2);
  const int cs = corner_case(a);
  if (!inner || m >= imperfect_delayed_threshold(a)) return cs == 1 ? "BCD" : "AB";
  if (cs == 1 && m >= a.a1) return "BDEF";
  return "BEG";
}

void attach_labels(DofRegion& r, const ExponentAverages& raw, bool inner) {
  auto [a, swapped] = label_users(raw);
  CornerSet cs = corner_points(a);
  const std::string names = table_corners(a, inner);
  r.labels.assign(r.vertices.size(), "");
  for (std::size_t k = 0; k < r.vertices.size(); ++k) {
    DofPoint v = swapped ? mirror(r.vertices[k]) : r.vertices[k];
    for (char c : names)
      if (cs.points.at(c) == v) r.labels[k].push_back(c);
  }
}

}  // namespace

const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Inner: return "inner";
    case RegionKind::Outer: return "outer";
    case RegionKind::Optimal: return "optimal";
  }
  return "";
}

DofPoint mirror(const DofPoint& p) { return {p.d2, p.d1}; }

std::vector<DofPoint> intersect_halfplanes(const std::vector<Halfplane>& hs) {
  std::vector<DofPoint> pts;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      const auto& p = hs[i];
      const auto& q = hs[j];
      Rational det = p.a * q.b - p.b * q.a;
      if (det == 0) continue;
      DofPoint x{(p.c * q.b - p.b * q.c) / det, (p.a * q.c - p.c * q.a) / det};
      if (std::all_of(hs.begin(), hs.end(), [&](const Halfplane& h) { return satisfies(h, x); }) &&
          std::find(pts.begin(), pts.end(), x) == pts.end())
        pts.push_back(x);
    }
  const DofPoint origin{0, 0};
  if (std::find(pts.begin(), pts.end(), origin) == pts.end())
    throw ValidationError("polygon does not have the origin as a vertex");
  pts.erase(std::find(pts.begin(), pts.end(), origin));
  // All remaining vertices lie in the closed first quadrant: sort by angle.
  std::sort(pts.begin(), pts.end(),
            [](const DofPoint& p, const DofPoint& q) { return cross(p, q) > 0; });
  pts.insert(pts.begin(), origin);
  // Drop vertices lying in the middle of an edge.
  std::vector<DofPoint> out;
  const std::size_t n = pts.size();
  for (std::size_t k = 0; k < n; ++k) {
    const DofPoint& prev = pts[(k + n - 1) % n];
    const DofPoint& next = pts[(k + 1) % n];
    const DofPoint& cur = pts[k];
    DofPoint u{cur.d1 - prev.d1, cur.d2 - prev.d2};
    DofPoint v{next.d1 - cur.d1, next.d2 - cur.d2};
    if (n < 3 || cross(u, v) != 0) out.push_back(cur);
  }
  return out;
}

DofRegion inner_region(const ExponentAverages& a) {
  validate_averages(a);
  DofRegion r;
  r.vertices = intersect_halfplanes(inner_constraints(a));
  r.kind = RegionKind::Inner;
  attach_labels(r, a, true);
  return r;
}

DofRegion outer_region(const ExponentAverages& a) {
  validate_averages(a);
  DofRegion r;
  r.vertices = intersect_halfplanes(outer_constraints(a));
  r.kind = RegionKind::Outer;
  attach_labels(r, a, false);
  return r;
}

std::variant<DofRegion, NotTight> optimal_region(const ExponentAverages& a) {
  validate_averages(a);
  const Rational th = imperfect_delayed_threshold(a);
  const Rational m = rmin(a.b1, a.b2);
  if (m >= th) {
    DofRegion r = outer_region(a);
    r.kind = RegionKind::Optimal;
    return r;
  }
  return NotTight{inner_region(a), outer_region(a), th, m};
}

int corner_case(const ExponentAverages& a) { return 2 * a.a1 - a.a2 < 1 ? 1 : 2; }

CornerSet corner_points(const ExponentAverages& a) {
  validate_averages(a);
  if (a.a2 > a.a1) throw ValidationError("corner points need labeled users (a2 <= a1)");
  const Rational& a1 = a.a1;
  const Rational& a2 = a.a2;
  const Rational m = rmin(a.b1, a.b2);
  CornerSet cs;
  cs.case_id = corner_case(a);
  cs.tight = m >= imperfect_delayed_threshold(a);
  cs.points['A'] = {1, (1 + a2) / 2};
  cs.points['B'] = {a2, 1};
  cs.points['C'] = {(2 + 2 * a1 - a2) / 3, (2 + 2 * a2 - a1) / 3};
  cs.points['D'] = {1, a1};
  cs.points['E'] = {2 * m - a2, 1 + a2 - m};
  cs.points['F'] = {1 + a1 - m, 2 * m - a1};
  cs.points['G'] = {1, m};
  cs.active = table_corners(a, true);
  return cs;
}

std::pair<Rational, Rational> scheme_params_for_corner(const ExponentAverages& a, char corner) {
  CornerSet cs = corner_points(a);
  if (cs.active.find(corner) == std::string::npos)
    throw CornerInactive(std::string("corner ") + corner + " is not attained for these averages");
  const Rational m = rmin(a.b1, a.b2);
  switch (corner) {
    case 'A': return {(1 + a.a2) / 2, Rational(0)};
    case 'B': return {a.a2, Rational(0)};
    case 'C': return {(1 + a.a1 + a.a2) / 3, Rational(0)};
    case 'D': return {a.a1, Rational(1)};
    case 'E': return {m, Rational(0)};
    case 'F':
    case 'G': return {m, Rational(1)};
  }
  throw CornerInactive(std::string("unknown corner ") + corner);
}

Rational imperfect_delayed_threshold(const ExponentAverages& a) {
  const Rational lo = rmin(a.a1, a.a2);
  return rmin((1 + a.a1 + a.a2) / 3, (1 + lo) / 2);
}

Rational symmetry_gain(const Rational& x, const Rational& y) {
  for (const Rational* v : {&x, &y})
    if (*v < 0 || *v > 1) throw ValidationError("exponent outside [0,1]");
  const Rational a1 = rmax(x, y), a2 = rmin(x, y);
  return pos(2 * a1 - a2 - 1) / 6;
}

Rational max_sum_dof(const DofRegion& r) {
  Rational best(0);
  for (const auto& v : r.vertices) best = rmax(best, v.d1 + v.d2);
  return best;
}

bool region_contains(const DofRegion& r, const DofPoint& p) {
  const std::size_t n = r.vertices.size();
  for (std::size_t k = 0; k < n; ++k) {
    const DofPoint& u = r.vertices[k];
    const DofPoint& v = r.vertices[(k + 1) % n];
    if (cross({v.d1 - u.d1, v.d2 - u.d2}, {p.d1 - u.d1, p.d2 - u.d2}) < 0) return false;
  }
  return true;
}

std::vector<FeedbackOption> sufficient_feedback(const Rational& d) {
  if (d < 0 || d > 1) throw ValidationError("target DoF outside [0,1]");
  const Rational abar = pos(3 * d - 2);
  const Rational second = pos(2 * d - 1);
  return {{"delayed", abar, second}, {"current_at_Tc", abar, second}};
}

Rational allowable_delay(const Rational& d, const DelayConstraint& c) {
  if (d < 0) throw ValidationError("target DoF must be nonnegative");
  if (c.value < 0 || c.value > 1) throw ValidationError("constraint value outside [0,1]");
  const Rational two_thirds(Rational(2) / 3);
  switch (c.kind) {
    case DelayConstraint::None:
      if (d <= two_thirds) return 1;
      if (d <= 1) return 3 * (1 - d);
      break;
    case DelayConstraint::AlphaMax:
      if (d <= two_thirds) return 1;
      if (c.value > 0 && d <= (2 + c.value) / 3) return 1 - (3 * d - 2) / c.value;
      break;
    case DelayConstraint::BetaMax: {
      const Rational third(Rational(1) / 3);
      if (d <= (1 + rmin(c.value, third)) / 2) return 1;
      if (d <= (1 + c.value) / 2) return (1 / (2 * d - 1) - 1) / 2;
      break;
    }
  }
  throw TargetUnachievable("symmetric DoF " + to_string(d) + " not reachable under the constraint");
}

bool allowable_delay_ambiguous(const DelayConstraint& c) {
  return c.kind == DelayConstraint::BetaMax && c.value < Rational(1) / 3;
}

}  // namespace miso
