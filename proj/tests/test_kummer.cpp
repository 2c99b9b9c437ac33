#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "exsup/errors.hpp"
#include "exsup/kummer.hpp"

using namespace exsup;

TEST_CASE("kummer: reference values") {
  // frozen from an independent arbitrary-precision evaluation
  CHECK(kummer_m(0.5, 1.5, 1.0) ==
        doctest::Approx(1.4626517459071816).epsilon(1e-13));
  CHECK(kummer_m(2.5, 1.3, 10.0) ==
        doctest::Approx(278321.51929825219).epsilon(1e-12));
}

TEST_CASE("kummer: special parameter values") {
  CHECK(kummer_m(0.0, 1.3, 2.7) == 1.0);               // a = 0: series is 1
  CHECK(kummer_m(1.7, 1.7, 0.9) ==
        doctest::Approx(std::exp(0.9)).epsilon(1e-14));  // a = b: exponential
  CHECK(kummer_m(1.2, 3.4, 0.0) == 1.0);               // z = 0
}

TEST_CASE("kummer: polynomial termination for non-positive integer a") {
  // M(-2, 0.5, 0.3) = 1 - (2/0.5) 0.3 + (2*1/(0.5*1.5)) 0.09/2 = -0.08
  CHECK(kummer_m(-2.0, 0.5, 0.3) == doctest::Approx(-0.08).epsilon(1e-14));
}

TEST_CASE("kummer: negative argument via the transform") {
  CHECK(kummer_m(0.3, 1.7, -5.0) ==
        doctest::Approx(0.61496147356137150).epsilon(1e-12));
}

TEST_CASE("kummer: invalid b and divergence guards") {
  CHECK_THROWS_AS((void)kummer_m(1.0, 0.0, 1.0), ParamError);
  CHECK_THROWS_AS((void)kummer_m(1.0, -2.0, 1.0), ParamError);
  KummerOptions tight;
  tight.max_terms = 3;
  CHECK_THROWS_AS((void)kummer_m(0.5, 1.5, 50.0, tight), SeriesDivergence);
}

TEST_CASE("kummer: derivative identity against finite differences") {
  double a = 0.8, b = 1.9, z = 2.3, h = 1e-6;
  double fd = (kummer_m(a, b, z + h) - kummer_m(a, b, z - h)) / (2.0 * h);
  CHECK(kummer_m_derivative(a, b, z) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("kummer: contiguous relation (b-a) M(a-1,b,z) + (2a-b+z) M(a,b,z) = a M(a+1,b,z)") {
  double a = 1.4, b = 2.6, z = 3.1;
  double lhs = (b - a) * kummer_m(a - 1.0, b, z) +
               (2.0 * a - b + z) * kummer_m(a, b, z);
  double rhs = a * kummer_m(a + 1.0, b, z);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
