#include "exsup/diffusion.hpp"

#include <cmath>
#include <memory>

#include "exsup/numerics.hpp"

namespace exsup {

ScaleSpeed scale_density(const DiffusionSpec& spec, double anchor) {
  if (!(anchor > spec.a && anchor < spec.b))
    throw DomainError("scale_density: anchor outside state interval");
  auto mu = spec.mu;
  auto sigma = spec.sigma;
  auto drift_ratio = [mu, sigma](double x) {
    double s = sigma(x);
    return 2.0 * mu(x) / (s * s);
  };
  auto cache = std::make_shared<num::MemoizedIntegral>(drift_ratio, anchor);
  auto S_prime = [cache](double x) { return std::exp(-(*cache)(x)); };
  auto m_prime = [cache, sigma](double x) {
    double s = sigma(x);
    return 2.0 / (s * s) * std::exp((*cache)(x));
  };
  return {S_prime, m_prime, anchor};
}

ScaleSpeed scale_from_antiderivative(std::function<double(double)> H,
                                     std::function<double(double)> sigma,
                                     double anchor) {
  double h0 = H(anchor);
  auto S_prime = [H, h0](double x) { return std::exp(h0 - H(x)); };
  auto m_prime = [H, h0, sigma](double x) {
    double s = sigma(x);
    return 2.0 / (s * s) * std::exp(H(x) - h0);
  };
  return {S_prime, m_prime, anchor};
}

ValidationReport validate_spec(const DiffusionSpec& spec,
                               std::span<const double> grid) {
  ValidationReport rep;
  auto global = [&rep](const std::string& msg) {
    rep.violations.push_back({num::kNaN, msg});
  };
  if (!(spec.a < spec.b)) global("interval endpoints out of order");
  if (!(spec.r > 0.0)) global("discount rate must be positive");
  if (std::isinf(spec.a) && (spec.boundary_a == Boundary::RegularKilled ||
                             spec.boundary_a == Boundary::RegularReflected))
    global("infinite left endpoint declared regular");
  if (std::isinf(spec.b) && (spec.boundary_b == Boundary::RegularKilled ||
                             spec.boundary_b == Boundary::RegularReflected))
    global("infinite right endpoint declared regular");
  if (!spec.mu || !spec.sigma) {
    global("mu and sigma must be set");
    return rep;
  }
  for (double x : grid) {
    if (!(x > spec.a && x < spec.b)) {
      rep.violations.push_back({x, "grid point outside state interval"});
      continue;
    }
    double s = spec.sigma(x);
    if (!(s > 0.0) || !std::isfinite(s))
      rep.violations.push_back({x, "sigma not strictly positive"});
    if (!std::isfinite(spec.mu(x)))
      rep.violations.push_back({x, "mu not finite"});
  }
  return rep;
}

}  // namespace exsup
