#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "exsup/fundamental.hpp"
#include "exsup/numerics.hpp"

using namespace exsup;

namespace {
const double kSigma = std::sqrt(0.1);  // testbed: psi = x^2, phi = x^-4
}

TEST_CASE("gbm pair: explicit powers and Wronskian") {
  FundamentalPair p = make_gbm_pair(0.15, kSigma, 0.4);
  for (double x : {0.5, 1.0, 2.0, 7.0}) {
    CHECK(p.psi(x) == doctest::Approx(x * x).epsilon(1e-13));
    CHECK(p.phi(x) == doctest::Approx(std::pow(x, -4.0)).epsilon(1e-13));
    CHECK(p.psi_prime(x) == doctest::Approx(2.0 * x).epsilon(1e-13));
    CHECK(p.phi_prime(x) ==
          doctest::Approx(-4.0 * std::pow(x, -5.0)).epsilon(1e-13));
  }
  CHECK(p.wronskian_B == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("gbm pair: requires r > mu") {
  CHECK_THROWS_AS((void)make_gbm_pair(0.5, 1.0, 0.4), ParamError);
}

TEST_CASE("gbm model bundles coefficients and a matching scale") {
  Model m = make_gbm_model(0.15, kSigma, 0.4);
  REQUIRE(m.gbm.has_value());
  CHECK(m.gbm->mu == 0.15);
  CHECK(m.scale.scale_density(2.0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(m.scale.speed_density(2.0) == doctest::Approx(40.0).epsilon(1e-10));
}

TEST_CASE("wronskian constancy across the state space") {
  Model gbm = make_gbm_model(0.15, kSigma, 0.4);
  Model logi = make_logistic_model(0.07, 0.5, 0.1, 0.035);
  for (const Model& m : {gbm, logi}) {
    double B0 = m.pair.wronskian_B;
    for (double x : {0.4, 0.9, 1.3, 2.1}) {
      double B = (m.pair.psi_prime(x) * m.pair.phi(x) -
                  m.pair.phi_prime(x) * m.pair.psi(x)) /
                 m.scale.scale_density(x);
      CHECK(B == doctest::Approx(B0).epsilon(1e-8));
    }
  }
}

TEST_CASE("logistic pair: frozen reference values") {
  FundamentalPair p = make_logistic_pair(0.07, 0.5, 0.1, 0.035);
  CHECK(p.psi(1.0) == doctest::Approx(1.362463496445402).epsilon(1e-10));
  CHECK(p.phi(1.0) == doctest::Approx(2226.557269592338).epsilon(1e-8));
  CHECK(p.psi_prime(1.0) == doctest::Approx(1.251490178524626).epsilon(1e-9));
  CHECK(p.phi_prime(1.0) == doctest::Approx(-9251.965529417168).epsilon(1e-8));
  CHECK(p.psi(2.0) == doctest::Approx(3.478622519802893).epsilon(1e-9));
  CHECK(p.phi(0.5) == doctest::Approx(454117.037153964).epsilon(1e-7));
}

TEST_CASE("logistic pair: solves the killed harmonic equation") {
  double mu = 0.07, gamma = 0.5, sigma = 0.1, r = 0.035;
  FundamentalPair p = make_logistic_pair(mu, gamma, sigma, r);
  double h = 1e-5;
  for (double x : {0.7, 1.0, 1.6}) {
    for (auto& u : {p.psi, p.phi}) {
      double upp = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
      double up = (u(x + h) - u(x - h)) / (2.0 * h);
      double lhs = 0.5 * sigma * sigma * x * x * upp +
                   mu * x * (1.0 - gamma * x) * up - r * u(x);
      CHECK(std::abs(lhs) < 1e-4 * (1.0 + std::abs(u(x))));
    }
  }
}

TEST_CASE("numeric pair reproduces the analytic gbm pair") {
  DiffusionSpec spec;
  spec.mu = [](double x) { return 0.15 * x; };
  spec.sigma = [](double x) { return kSigma * x; };
  spec.a = 0.0;
  spec.b = num::kInf;
  spec.r = 0.4;
  ScaleSpeed ss = scale_density(spec, 1.0);
  ODEConfig oc;
  oc.x_lo = 1e-4;
  oc.x_hi = 50.0;
  oc.x_ref = 1.0;
  FundamentalPair p = make_numeric_pair(spec, ss, oc);
  for (double x : {0.2, 0.9, 3.0, 20.0}) {
    CHECK(p.psi(x) == doctest::Approx(x * x).epsilon(1e-6));
    CHECK(p.phi(x) == doctest::Approx(std::pow(x, -4.0)).epsilon(1e-6));
    CHECK(p.psi_prime(x) == doctest::Approx(2.0 * x).epsilon(1e-5));
  }
}

TEST_CASE("numeric pair: stable under truncation changes") {
  DiffusionSpec spec;
  spec.mu = [](double x) { return 0.15 * x; };
  spec.sigma = [](double x) { return kSigma * x; };
  spec.a = 0.0;
  spec.b = num::kInf;
  spec.r = 0.4;
  ScaleSpeed ss = scale_density(spec, 1.0);
  ODEConfig oc1{1e-4, 50.0, 1.0, 1e-11, 1e-13, 4000};
  ODEConfig oc2{1e-5, 80.0, 1.0, 1e-11, 1e-13, 4000};
  FundamentalPair p1 = make_numeric_pair(spec, ss, oc1);
  FundamentalPair p2 = make_numeric_pair(spec, ss, oc2);
  for (double x : {0.5, 1.4, 6.0})
    CHECK(p1.psi(x) == doctest::Approx(p2.psi(x)).epsilon(1e-6));
}

TEST_CASE("numeric pair: reflected boundaries are rejected") {
  DiffusionSpec spec;
  spec.mu = [](double) { return 0.0; };
  spec.sigma = [](double) { return 1.0; };
  spec.a = 0.0;
  spec.b = 1.0;
  spec.boundary_a = Boundary::RegularReflected;
  spec.boundary_b = Boundary::RegularKilled;
  spec.r = 1.0;
  ScaleSpeed ss = scale_density(spec, 0.5);
  ODEConfig oc{0.01, 0.99, 0.5, 1e-11, 1e-13, 1000};
  CHECK_THROWS_AS((void)make_numeric_pair(spec, ss, oc), NotSupported);
}

TEST_CASE("killed solutions vanish at their pinned level") {
  Model m = make_gbm_model(0.15, kSigma, 0.4);
  KilledSolutions ks = killed_solutions(m.pair);
  CHECK(ks.psi_hat(1.5, 1.5) == doctest::Approx(0.0));
  CHECK(ks.phi_hat(2.5, 2.5) == doctest::Approx(0.0));
  // psi_hat increasing in x, phi_hat decreasing
  CHECK(ks.psi_hat(1.5, 2.0) > ks.psi_hat(1.5, 1.8));
  CHECK(ks.phi_hat(2.5, 1.2) > ks.phi_hat(2.5, 1.4));
}
