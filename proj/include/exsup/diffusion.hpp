#pragma once

// State-space description of a one-dimensional diffusion
// dX = mu(X) dt + sigma(X) dW on (a, b), killed at rate r, together with its
// scale and speed densities S'(x) = exp(-int 2 mu / sigma^2) and
// m'(x) = 2 / (sigma^2 S').

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "exsup/errors.hpp"

namespace exsup {

enum class Boundary { Natural, Entrance, Exit, RegularKilled, RegularReflected };

struct DiffusionSpec {
  std::function<double(double)> mu;
  std::function<double(double)> sigma;
  double a = 0.0;  // left endpoint, may be -inf
  double b = 0.0;  // right endpoint, may be +inf
  Boundary boundary_a = Boundary::Natural;
  Boundary boundary_b = Boundary::Natural;
  double r = 0.0;  // discount / killing rate, > 0
};

struct ScaleSpeed {
  std::function<double(double)> scale_density;  // S'
  std::function<double(double)> speed_density;  // m'
  double anchor = 0.0;                          // S'(anchor) = 1
};

// Generic quadrature-backed construction, S'(x) = exp(-int_anchor^x 2mu/sigma^2),
// with a memoized integral cache shared by all copies.
ScaleSpeed scale_density(const DiffusionSpec& spec, double anchor);

// Closed-form construction from an antiderivative H of 2mu/sigma^2.
ScaleSpeed scale_from_antiderivative(std::function<double(double)> H,
                                     std::function<double(double)> sigma,
                                     double anchor);

struct Violation {
  double x;          // location, NaN for global problems
  std::string what;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks positivity of sigma on the grid, r > 0, interval ordering, and that
// infinite endpoints are declared non-regular.
ValidationReport validate_spec(const DiffusionSpec& spec,
                               std::span<const double> grid);

}  // namespace exsup
