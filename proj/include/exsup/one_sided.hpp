#pragma once

// One-boundary problem: stop the first time X reaches [y*, b).  The optimal
// threshold is y* = inf{y : f_hat(y) >= 0} with f_hat = g - psi g'/psi',
// the value below y* is psi(x) g(y*)/psi(y*), and the same value has the
// expected-supremum quadrature form
//   J(x) = psi(x) int_{x v y*}^{b} f_hat(z) psi'(z)/psi(z)^2 dz.

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "exsup/functionals.hpp"

namespace exsup {

struct OneSidedConfig {
  // truncated search window; NaN means choose automatically (x_hi extends
  // geometrically until g/psi < 1e-12 of its maximum)
  double x_lo = std::numeric_limits<double>::quiet_NaN();
  double x_hi = std::numeric_limits<double>::quiet_NaN();
  int grid_nodes = 400;
  double bisect_tol = 1e-10;
  int max_iter = 200;
  // psi'(a+)/S'(a+) for the integral form; 0 when the limit vanishes
  std::optional<double> boundary_term;
};

struct RepresentationOneSided {
  Payoff payoff;
  Model model;
  double y_star = 0.0;
  bool smooth_fit = true;
  double jump_at_boundary = 0.0;  // f_hat(y*+) when y* is a kink, else 0
  bool monotone_on_stop_region = true;
  double x_hi = 0.0;  // truncation actually used

  std::function<double(double)> f_hat;  // right-sided limits
  std::function<double(double)> value;
};

// V_y(x): g(x) for x >= y, psi(x) g(y)/psi(y) below.
double value_threshold(const Payoff& payoff, const Model& model, double y,
                       double x);

double f_hat(const Payoff& payoff, const Model& model, double x,
             Side side = Side::Right);

// Integral form of f_hat:
// [(L_psi g)(y*+) - int_{y*}^x (G_r g) psi m' - kink jumps] /
// [r int_a^x psi m' + psi'(a+)/S'(a+)].
double f_hat_integral(const Payoff& payoff, const Model& model, double y_star,
                      double x, std::optional<double> boundary_term = {});

RepresentationOneSided solve_one_sided(const Payoff& payoff,
                                       const Model& model,
                                       OneSidedConfig cfg = {});

double j_value(const RepresentationOneSided& rep, double x);

struct DiagnosisReport {
  // (A) payoff concave and psi convex on [y, b)
  bool payoff_concave = true;
  bool psi_convex = true;
  // (B) structure toward b
  bool ratio_increasing_somewhere_below = false;  // exists z<y: (g/psi)' > 0
  bool kink_condition = true;                     // g'(k+) <= g'(k-) on (z,b)
  bool generator_nonpositive = true;              // G_r g <= 0 on (z,b)
  bool generator_nonincreasing = true;
  bool f_hat_nondecreasing = true;
  std::vector<double> f_hat_decreasing_at;        // sample points of decrease
  // D(x) = (G_r g) psi'/S' + r (L_psi g) sign trace on [y, b)
  std::vector<std::pair<double, double>> d_trace;
};

DiagnosisReport diagnose_monotonicity(const Payoff& payoff, const Model& model,
                                      double y, double x_hi_hint = 0.0);

}  // namespace exsup
