#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "exsup/diffusion.hpp"
#include "exsup/numerics.hpp"

using namespace exsup;

namespace {

// testbed: dX = 0.15 X dt + sqrt(0.1) X dW, r = 0.4; S' = x^-3, m' = 20 x
DiffusionSpec testbed() {
  DiffusionSpec s;
  s.mu = [](double x) { return 0.15 * x; };
  s.sigma = [](double x) { return std::sqrt(0.1) * x; };
  s.a = 0.0;
  s.b = num::kInf;
  s.r = 0.4;
  return s;
}

}  // namespace

TEST_CASE("scale and speed densities: geometric testbed") {
  ScaleSpeed ss = scale_density(testbed(), 1.0);
  CHECK(ss.scale_density(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double x : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(ss.scale_density(x) ==
          doctest::Approx(std::pow(x, -3.0)).epsilon(1e-10));
    CHECK(ss.speed_density(x) == doctest::Approx(20.0 * x).epsilon(1e-10));
  }
}

TEST_CASE("closed-form antiderivative agrees with quadrature construction") {
  DiffusionSpec s = testbed();
  ScaleSpeed quad = scale_density(s, 1.0);
  ScaleSpeed closed =
      scale_from_antiderivative([](double x) { return 3.0 * std::log(x); },
                                s.sigma, 1.0);
  for (double x : {0.3, 0.9, 1.7, 4.2})
    CHECK(quad.scale_density(x) ==
          doctest::Approx(closed.scale_density(x)).epsilon(1e-10));
}

TEST_CASE("scale density normalization moves with the anchor") {
  DiffusionSpec s = testbed();
  ScaleSpeed s1 = scale_density(s, 1.0);
  ScaleSpeed s2 = scale_density(s, 2.0);
  CHECK(s2.scale_density(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  // the two normalizations differ by the constant S'_1(2)
  double c = s1.scale_density(2.0);
  for (double x : {0.5, 1.5, 3.0})
    CHECK(s2.scale_density(x) ==
          doctest::Approx(s1.scale_density(x) / c).epsilon(1e-10));
}

TEST_CASE("spec validation flags bad data") {
  DiffusionSpec s = testbed();
  std::vector<double> grid{0.5, 1.0, 2.0};
  CHECK(validate_spec(s, grid).ok());

  DiffusionSpec bad_sigma = s;
  bad_sigma.sigma = [](double x) { return x - 1.0; };  // vanishes at 1
  CHECK_FALSE(validate_spec(bad_sigma, grid).ok());

  DiffusionSpec bad_r = s;
  bad_r.r = 0.0;
  CHECK_FALSE(validate_spec(bad_r, grid).ok());

  DiffusionSpec bad_interval = s;
  bad_interval.a = 2.0;
  bad_interval.b = 1.0;
  CHECK_FALSE(validate_spec(bad_interval, grid).ok());

  DiffusionSpec bad_boundary = s;
  bad_boundary.boundary_b = Boundary::RegularKilled;  // at +inf
  CHECK_FALSE(validate_spec(bad_boundary, grid).ok());
}
