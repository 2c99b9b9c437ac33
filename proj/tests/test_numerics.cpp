#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "exsup/numerics.hpp"

using namespace exsup;

TEST_CASE("quadrature: polynomials are exact") {
  auto f = [](double x) { return 3.0 * x * x - 2.0 * x + 1.0; };
  CHECK(num::integrate(f, 0.0, 2.0) == doctest::Approx(8.0 - 4.0 + 2.0).epsilon(1e-13));
}

TEST_CASE("quadrature: kink splitting handles |x|") {
  auto f = [](double x) { return std::abs(x); };
  std::vector<double> kinks{0.0};
  CHECK(num::integrate(f, -1.0, 1.0, kinks) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("quadrature: infinite endpoints") {
  auto gauss = [](double x) { return std::exp(-x * x); };
  CHECK(num::integrate(gauss, -num::kInf, num::kInf) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  auto expdec = [](double x) { return std::exp(-2.0 * x); };
  CHECK(num::integrate(expdec, 0.0, num::kInf) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("quadrature: reversed and empty intervals") {
  auto f = [](double x) { return x; };
  CHECK(num::integrate(f, 1.0, 1.0) == 0.0);
  CHECK(num::integrate(f, 2.0, 0.0) == doctest::Approx(-2.0));
}

TEST_CASE("quadrature: divergent integrand is reported") {
  auto f = [](double x) { return 1.0 / x; };
  CHECK_THROWS_AS((void)num::integrate(f, 0.0, 1.0), QuadratureFailure);
}

TEST_CASE("brent root: cosine") {
  double r = num::brent_root([](double x) { return std::cos(x); }, 1.0, 2.0);
  CHECK(r == doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("brent root: no bracket throws") {
  CHECK_THROWS_AS(
      (void)num::brent_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
      NoRoot);
}

TEST_CASE("golden minimization") {
  double m = num::golden_min([](double x) { return (x - 2.0) * (x - 2.0); },
                             0.0, 5.0, 1e-12);
  CHECK(m == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("pairwise sum: independent of chunking") {
  std::vector<double> v(1013);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::sin(0.1 * double(i)) * 1e-3 + 1.0 / (1.0 + double(i));
  double whole = num::pairwise_sum(v);
  // reduction is a fixed binary tree: identical across re-invocations
  CHECK(whole == num::pairwise_sum(v));
  double manual = 0.0;
  for (double x : v) manual += x;
  CHECK(whole == doctest::Approx(manual).epsilon(1e-13));
}

TEST_CASE("grids") {
  auto l = num::linspace(0.0, 1.0, 5);
  CHECK(l.front() == 0.0);
  CHECK(l.back() == 1.0);
  CHECK(l[2] == doctest::Approx(0.5));
  auto g = num::geomspace(1.0, 16.0, 5);
  CHECK(g[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)num::geomspace(-1.0, 2.0, 3), DomainError);
}

TEST_CASE("memoized integral matches direct quadrature") {
  num::MemoizedIntegral F([](double t) { return std::exp(-t); }, 0.0);
  CHECK(F(3.0) == doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-11));
  CHECK(F(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-11));
  // increments reuse the cache; re-query is exact
  double v = F(2.0);
  CHECK(F(2.0) == v);
  CHECK(F(-1.0) == doctest::Approx(1.0 - std::exp(1.0)).epsilon(1e-10));
}
