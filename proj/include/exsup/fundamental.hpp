#pragma once

// Fundamental pair (psi, phi): the increasing and decreasing positive
// solutions of (1/2) sigma^2 u'' + mu u' - r u = 0, the constant Wronskian
// B = (psi' phi - phi' psi)/S', and the two-point "killed" combinations
// psi_hat_z, phi_hat_y that vanish at a prescribed level.

#include <functional>
#include <optional>

#include "exsup/diffusion.hpp"

namespace exsup {

enum class PairSource { AnalyticGBM, AnalyticLogistic, NumericODE, UserSupplied };

struct FundamentalPair {
  std::function<double(double)> psi, phi;
  std::function<double(double)> psi_prime, phi_prime;
  double wronskian_B = 0.0;  // relative to the scale normalization in use
  PairSource source = PairSource::UserSupplied;
};

// Geometric Brownian motion dX = mu X dt + sigma X dW:
// psi = x^{kappa+}, phi = x^{kappa-}; requires r > max(mu, 0) so that psi is
// the power with exponent > 1 and x/psi(x) -> 0.  B is quoted for the scale
// normalization S'(1) = 1.
FundamentalPair make_gbm_pair(double mu, double sigma, double r);

// Logistic (Verhulst) diffusion dX = mu X (1 - gamma X) dt + sigma X dW:
// psi = x^{kappa+} M(kappa+, 1+kappa+-kappa-, theta x) and symmetrically for
// phi, with theta = 2 mu gamma / sigma^2.  B again for S'(1) = 1.
FundamentalPair make_logistic_pair(double mu, double gamma, double sigma,
                                   double r, double kummer_precision = 1e-14);

struct ODEConfig {
  double x_lo = 0.0;       // truncated left endpoint (inside (a,b))
  double x_hi = 0.0;       // truncated right endpoint
  double x_ref = 1.0;      // normalization point: psi(x_ref) = phi(x_ref) = 1
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  int n_nodes = 4000;      // stored interpolation nodes
};

// Numeric pair by shooting the first-order system (u, w = u'/S') with
// u' = S' w, w' = r m' u from each truncated endpoint, stored as cubic
// Hermite data in log u.  RegularReflected endpoints are not supported.
FundamentalPair make_numeric_pair(const DiffusionSpec& spec,
                                  const ScaleSpeed& scale,
                                  const ODEConfig& cfg);

struct KilledSolutions {
  FundamentalPair pair;
  // increasing in x, vanishing at z
  double psi_hat(double z, double x) const {
    return pair.psi(x) * pair.phi(z) - pair.psi(z) * pair.phi(x);
  }
  // decreasing in x, vanishing at y
  double phi_hat(double y, double x) const {
    return pair.phi(x) * pair.psi(y) - pair.phi(y) * pair.psi(x);
  }
  double psi_hat_dx(double z, double x) const {
    return pair.psi_prime(x) * pair.phi(z) - pair.psi(z) * pair.phi_prime(x);
  }
  double phi_hat_dx(double y, double x) const {
    return pair.phi_prime(x) * pair.psi(y) - pair.phi(y) * pair.psi_prime(x);
  }
};

inline KilledSolutions killed_solutions(const FundamentalPair& pair) {
  return {pair};
}

struct GbmCoeffs {
  double mu, sigma;
};

// Everything downstream code needs about one problem instance.
struct Model {
  DiffusionSpec spec;
  ScaleSpeed scale;
  FundamentalPair pair;
  std::optional<GbmCoeffs> gbm;  // set for GBM models; enables exact paths
  double r() const { return spec.r; }
};

Model make_gbm_model(double mu, double sigma, double r, double anchor = 1.0);
Model make_logistic_model(double mu, double gamma, double sigma, double r,
                          double anchor = 1.0, double kummer_precision = 1e-14);
// Bundles user-supplied pieces; recomputes B at the scale anchor so the pair
// and scale normalizations agree.
Model make_custom_model(DiffusionSpec spec, ScaleSpeed scale,
                        FundamentalPair pair);

}  // namespace exsup
