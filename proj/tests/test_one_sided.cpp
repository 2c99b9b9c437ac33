#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "exsup/numerics.hpp"
#include "exsup/one_sided.hpp"

using namespace exsup;

namespace {

Model testbed() { return make_gbm_model(0.15, std::sqrt(0.1), 0.4); }

}  // namespace

TEST_CASE("f_hat closed form on the testbed call") {
  Model m = testbed();
  Payoff p = make_call(3.0);
  // f_hat = x - 3 - x/2 = x/2 - 3
  for (double x : {2.0, 6.0, 9.0})
    CHECK(f_hat(p, m, x) == doctest::Approx(0.5 * x - 3.0).epsilon(1e-12));
}

TEST_CASE("uncapped call: smooth threshold at 6 and quadrature identity") {
  Model m = testbed();
  Payoff p = make_call(3.0);
  auto rep = solve_one_sided(p, m);
  CHECK(rep.y_star == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(rep.smooth_fit);
  CHECK(rep.monotone_on_stop_region);
  CHECK(std::abs(rep.f_hat(rep.y_star)) < 1e-8);
  // V(x) = x^2/12 below the threshold
  CHECK(rep.value(4.0) == doctest::Approx(16.0 / 12.0).epsilon(1e-10));
  for (double x : {2.0, 5.0, 7.0, 12.0})
    CHECK(j_value(rep, x) == doctest::Approx(rep.value(x)).epsilon(1e-6));
}

TEST_CASE("capped call: corner threshold at the cap") {
  Model m = testbed();
  Payoff p = make_capped_call(3.0, 2.0);
  auto rep = solve_one_sided(p, m);
  CHECK(rep.y_star == doctest::Approx(5.0).epsilon(1e-9));
  CHECK_FALSE(rep.smooth_fit);
  CHECK(rep.jump_at_boundary == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f_hat(p, m, 5.0, Side::Left) == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(f_hat(p, m, 5.0, Side::Right) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.value(4.0) == doctest::Approx(1.28).epsilon(1e-12));
  for (double x : {1.0, 4.0, 4.9, 6.0, 15.0})
    CHECK(j_value(rep, x) == doctest::Approx(rep.value(x)).epsilon(1e-6));
}

TEST_CASE("value_threshold guards a negative stop value") {
  Model m = testbed();
  Payoff p = make_call(3.0);
  CHECK_THROWS_AS((void)value_threshold(p, m, 2.0, 1.0), DomainError);
  CHECK(value_threshold(p, m, 6.0, 8.0) == doctest::Approx(5.0));
}

TEST_CASE("integral form of f_hat matches the closed form") {
  Model m = testbed();
  Payoff p = make_call(3.0);
  auto rep = solve_one_sided(p, m);
  for (double x : {7.0, 9.0, 14.0})
    CHECK(f_hat_integral(p, m, rep.y_star, x) ==
          doctest::Approx(f_hat(p, m, x)).epsilon(1e-7));
  // across the capped call's kink the integral form needs the jump term
  Payoff pc = make_capped_call(3.0, 2.0);
  CHECK(f_hat_integral(pc, m, 5.0, 8.0) ==
        doctest::Approx(f_hat(pc, m, 8.0)).epsilon(1e-7));
}

TEST_CASE("integral form: attainable left endpoint needs a boundary term") {
  Model m = testbed();
  m.spec.a = 0.5;
  m.spec.boundary_a = Boundary::RegularKilled;
  Payoff p = make_call(3.0);
  CHECK_THROWS_AS((void)f_hat_integral(p, m, 6.0, 8.0), BoundaryTermUnknown);
}

TEST_CASE("no positive payoff part is rejected") {
  Model m = testbed();
  Payoff p = make_constant(-1.0);
  CHECK_THROWS_AS((void)solve_one_sided(p, m), NoPositiveSet);
}

TEST_CASE("monotonicity diagnostic: resolvent counterexample") {
  Model m = testbed();
  auto pi = [](double x) { return (std::pow(x, 5.0) - 2.0) * std::exp(-x) + 1.0; };
  Payoff g = make_resolvent_payoff(pi, m);
  auto rep = solve_one_sided(g, m);
  CHECK_FALSE(rep.monotone_on_stop_region);
  auto diag = diagnose_monotonicity(g, m, rep.y_star, rep.x_hi);
  CHECK_FALSE(diag.f_hat_nondecreasing);
  CHECK(!diag.f_hat_decreasing_at.empty());
  // the sufficient conditions correctly fail to hold
  CHECK_FALSE(diag.generator_nonincreasing);
  // the quadrature identity holds regardless of monotonicity
  for (double x : {2.0, rep.y_star * 1.1, rep.y_star * 2.0})
    CHECK(j_value(rep, x) == doctest::Approx(rep.value(x)).epsilon(1e-5));
}

TEST_CASE("monotonicity diagnostic: clean example satisfies the conditions") {
  Model m = testbed();
  Payoff p = make_call(3.0);
  auto diag = diagnose_monotonicity(p, m, 6.0);
  CHECK(diag.payoff_concave);
  CHECK(diag.psi_convex);
  CHECK(diag.generator_nonpositive);
  CHECK(diag.f_hat_nondecreasing);
}
