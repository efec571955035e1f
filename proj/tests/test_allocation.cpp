#include "common.hpp"
#include "miso/allocation.hpp"
#include "miso/errors.hpp"

using namespace miso;
using miso::test::R;
using miso::test::rand_rat;

namespace {

ExponentAverages sym(const Rational& a, const Rational& b) { return {a, a, b, b}; }

// Independent check of the three defining constraints.
void expect_constraints(const std::vector<Rational>& al, const std::vector<Rational>& be,
                        const Rational& db, const std::vector<Rational>& d) {
  REQUIRE(d.size() == al.size());
  Rational s(0), ex(0);
  for (std::size_t t = 0; t < d.size(); ++t) {
    CHECK(d[t] >= 0);
    CHECK(d[t] <= be[t]);
    s += d[t];
    ex += pos(d[t] - al[t]);
  }
  const long long T = static_cast<long long>(d.size());
  CHECK(s / T == db);
  CHECK(ex / T == pos(db - mean(al)));
}

}  // namespace

TEST_CASE("delta sequence examples") {
  auto d = solve_delta_sequence({R(0), R(0), R(0)}, {R(1), R(0), R(0)}, R(1, 3));
  CHECK(d == std::vector<Rational>{R(1), R(0), R(0)});
  d = solve_delta_sequence({R(1, 2), R(1, 2)}, {R(1), R(1)}, R(1, 4));
  CHECK(d == std::vector<Rational>{R(1, 2), R(0)});
  d = solve_delta_sequence({R(1, 4), R(1, 4)}, {R(1), R(1, 2)}, R(1, 2));
  CHECK(d == std::vector<Rational>{R(3, 4), R(1, 4)});
  expect_constraints({R(1, 4), R(1, 4)}, {R(1), R(1, 2)}, R(1, 2), d);
  d = solve_delta_sequence({R(0), R(0)}, {R(1), R(1)}, R(0));
  CHECK(d == std::vector<Rational>{R(0), R(0)});
}

TEST_CASE("delta sequence errors") {
  CHECK_THROWS_AS(solve_delta_sequence({R(0)}, {R(1), R(1)}, R(0)), LengthMismatch);
  CHECK_THROWS_AS(solve_delta_sequence({R(1, 2)}, {R(1, 4)}, R(0)), RangeViolation);
  CHECK_THROWS_AS(solve_delta_sequence({R(0), R(0)}, {R(1, 2), R(0)}, R(1, 2)), Infeasible);
  CHECK_THROWS_AS(solve_delta_sequence({}, {}, R(0)), ValidationError);
}

TEST_CASE("delta sequence constraints on random instances") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 2000; ++it) {
    const int T = 2 + static_cast<int>(rng() % 15);
    std::vector<Rational> al, be;
    for (int t = 0; t < T; ++t) {
      al.push_back(rand_rat(rng, R(0), R(1), 12));
      be.push_back(rand_rat(rng, al.back(), R(1), 12));
    }
    const Rational db = rand_rat(rng, R(0), mean(be), 48);
    const auto d = solve_delta_sequence(al, be, db);
    expect_constraints(al, be, db, d);
  }
}

TEST_CASE("last phase") {
  CHECK(solve_last_phase({R(1), R(1)}, R(1, 2)) == std::vector<Rational>{R(1), R(0)});
  CHECK(solve_last_phase({R(1, 2), R(1, 3)}, R(0)) == std::vector<Rational>{R(0), R(0)});
  CHECK(solve_last_phase({R(1, 3), R(1, 3)}, R(1, 3)) == std::vector<Rational>{R(1, 3), R(1, 3)});
  CHECK_THROWS_AS(solve_last_phase({R(0), R(1, 2)}, R(1, 2)), Infeasible);
  std::mt19937_64 rng(6);
  for (int it = 0; it < 500; ++it) {
    std::vector<Rational> al;
    for (int t = 0; t < 5; ++t) al.push_back(rand_rat(rng, R(0), R(1), 10));
    const Rational m = rand_rat(rng, R(0), mean(al), 50);
    const auto d = solve_last_phase(al, m);
    for (int t = 0; t < 5; ++t) CHECK(d[t] <= al[t]);
    CHECK(mean(d) == m);
  }
}

TEST_CASE("phase budgets") {
  PhaseBudget b = phase_budget(sym(R(0), R(1, 3)), R(1, 3), R(0));
  CHECK(b.private1 == R(2, 3));
  CHECK(b.private2 == R(2, 3));
  CHECK(b.common == R(2, 3));
  CHECK(b.quantized == R(2, 3));
  CHECK(b.delta_com == 0);

  b = phase_budget(sym(R(5, 8), R(3, 4)), R(3, 4), R(1, 2));
  CHECK(b.private1 == R(7, 8));
  CHECK(b.private2 == R(7, 8));
  CHECK(b.common == R(1, 4));
  CHECK(b.quantized == R(1, 4));

  b = phase_budget(sym(R(1, 2), R(1)), R(0), R(1));
  CHECK(b.private1 == 0);
  CHECK(b.common == 1);
  CHECK(b.quantized == 0);
  CHECK(b.delta_com == 1);

  CHECK_THROWS_AS(phase_budget(sym(R(0), R(1, 3)), R(1, 2), R(0)), DeltaBarTooLarge);
  CHECK_THROWS_AS(phase_budget(sym(R(0), R(1)), R(0), R(3, 2)), ValidationError);
}

TEST_CASE("dof from parameters") {
  CHECK(dof_from_params(sym(R(0), R(1, 3)), R(1, 3), R(0)) == DofPoint{R(2, 3), R(2, 3)});
  for (const Rational& a : {R(0), R(1, 5), R(1, 2)})
    CHECK(dof_from_params(sym(a, R(1)), a, R(0)) == DofPoint{a, R(1)});
  CHECK(dof_from_params(sym(R(5, 8), R(3, 4)), R(3, 4), R(1, 3)) == DofPoint{R(7, 8), R(7, 8)});

  // four-slot profile whose quantized bits fit one phase
  ExponentProfile p;
  p.n = 4;
  p.alpha1 = {R(0), R(0), R(1, 4), R(0)};
  p.beta1 = {R(1), R(1, 4), R(1, 4), R(0)};
  p.alpha2 = {R(0), R(1, 4), R(0), R(0)};
  p.beta2 = {R(1), R(1, 4), R(1, 4), R(0)};
  const ExponentAverages a = averages(p);
  const auto [db, om] = scheme_params_for_corner(a, 'C');
  CHECK(dof_from_params(a, db, om) == DofPoint{R(11, 16), R(11, 16)});
  CHECK(phase_budget(a, db, om).delta_com == 0);
}

TEST_CASE("achieved points lie in the inner region") {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 500; ++it) {
    ExponentAverages a;
    a.a1 = rand_rat(rng, R(0), R(1), 20);
    a.a2 = rand_rat(rng, R(0), a.a1, 20);
    a.b1 = rand_rat(rng, a.a1, R(1), 20);
    a.b2 = rand_rat(rng, a.a2, R(1), 20);
    const Rational db = rand_rat(rng, R(0), delta_bar_bound(a), 40);
    const Rational om = rand_rat(rng, R(0), R(1), 10);
    const PhaseBudget b = phase_budget(a, db, om);
    CHECK(b.common >= b.quantized);
    CHECK(region_contains(inner_region(a), dof_from_params(a, db, om)));
  }
}

TEST_CASE("plans") {
  const ExponentProfile mat = make_mat_profile(1);
  const AllocationPlan p = make_plan(mat, R(1, 3));
  CHECK(p.T == 3);
  CHECK(mean(p.delta1) == R(1, 3));
  CHECK(mean(p.delta2) == R(1, 3));
  for (int t = 0; t < 3; ++t) {
    CHECK(p.rates[t].r_a == p.delta2[t]);
    CHECK(p.rates[t].r_a2 == pos(p.delta2[t] - mat.alpha2[t]));
    CHECK(p.rates[t].r_b == p.delta1[t]);
  }
  const AllocationPlan l = make_last_phase_plan(make_constant_profile(2, R(1, 2), R(1)));
  CHECK(l.last_phase);
  CHECK(l.delta1 == std::vector<Rational>{R(1, 2), R(1, 2)});
  CHECK(l.rates[0].r_a2 == 0);
}
