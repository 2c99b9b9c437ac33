#pragma once

// Two-boundary problem: stop on (a, z*] u [y*, b).  The optimal pair solves
// (L_psi g)(z) = (L_psi g)(y) and (L_phi g)(z) = (L_phi g)(y); the matching
// curve beta (and its inverse alpha) is traced from H(z, beta(z)) = 0, the
// crossover zeta = lim beta is where the two-sided tail collapses onto the
// one-sided formula, and the representation functions f1/f2 are evaluated
// both in closed ratio form and as generator-integral ratios.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exsup/functionals.hpp"
#include "exsup/tabulated_curve.hpp"

namespace exsup {

struct TwoSidedValueCoeffs {
  std::function<double(double, double)> A1, A2;  // (z, y) -> coefficient
};

TwoSidedValueCoeffs value_coeffs(const Payoff& payoff, const Model& model);

// V_{z,y}(x): g outside (z,y); inside, the two-point exit value.
double value_two_sided(const Payoff& payoff, const Model& model, double z,
                       double y, double x);

// H(z,y) = int_z^y (G_r g) u1 m' + interior-kink jumps, with
// u1 = phi * [psi'/S']_z^y - psi * [phi'/S']_z^y; H = 0 is the matching
// condition F1^y(z) = F2^z(y).
double h_function(const Payoff& payoff, const Model& model, double z, double y);
double h_partial_y(const Payoff& payoff, const Model& model, double z, double y);
double h_partial_z(const Payoff& payoff, const Model& model, double z, double y);

// Boundary-perturbation values (also the stopping-signal branches):
// h1(x,y) = F1^y(x) = limit of the two-point indifference value as z -> x-,
// h2(x,z) = F2^z(x) symmetrically.
double h1_closed(const Payoff& payoff, const Model& model, double x, double y,
                 Side side_at_x = Side::Right);
double h2_closed(const Payoff& payoff, const Model& model, double x, double z,
                 Side side_at_x = Side::Right);
// Same quantities as kink-corrected generator-integral ratios.
double f1_integral(const Payoff& payoff, const Model& model, double z, double y);
double f2_integral(const Payoff& payoff, const Model& model, double z, double y);

struct TwoSidedConfig {
  double z_lo = std::numeric_limits<double>::quiet_NaN();   // search floor
  double y_hi = std::numeric_limits<double>::quiet_NaN();   // search ceiling
  double a_trunc = std::numeric_limits<double>::quiet_NaN();// beta-trace floor
  int beta_nodes = 200;
  int search_nodes = 160;
  double root_tol = 1e-13;
  bool check_dual_formulas = true;  // closed vs integral f1 at every node
};

struct RepresentationTwoSided {
  Payoff payoff;
  Model model;
  double z_star = 0.0, y_star = 0.0, zeta = 0.0;
  bool smooth_fit_lower = true, smooth_fit_upper = true;
  TabulatedCurve beta;   // i in (a, z*] -> [y*, zeta)
  TabulatedCurve alpha;  // inverse; alpha(m) = a for m >= zeta
  TabulatedCurve f1;     // tabulated on the beta grid
  TabulatedCurve f2;     // tabulated on [y*, zeta) u one-sided tail grid
  std::function<double(double)> value;
  std::vector<std::string> warnings;

  // exact evaluators (closed forms through the traced curves)
  double beta_of(double i) const;
  double alpha_of(double m) const;
  double f1_at(double i) const;
  double f2_at(double m) const;
};

// Optimality system.  Returns (z*, y*); *corner_upper set when y* sits at a
// cap point without smooth fit.
std::pair<double, double> solve_optimal_pair(const Payoff& payoff,
                                             const Model& model,
                                             const TwoSidedConfig& cfg = {},
                                             bool* corner_upper = nullptr);

// Matching-curve continuation from beta(z*) = y* down toward a; returns the
// curve and zeta.  For a corner upper boundary beta is the constant y*.
std::pair<TabulatedCurve, double> trace_beta(const Payoff& payoff,
                                             const Model& model, double z_star,
                                             double y_star, bool corner_upper,
                                             const TwoSidedConfig& cfg,
                                             std::vector<std::string>* warnings
                                             = nullptr);

// Full pipeline: pair, curves, crossover, f1/f2 tabulations, value.
RepresentationTwoSided solve_two_sided(const Payoff& payoff, const Model& model,
                                       TwoSidedConfig cfg = {});

// Expected-supremum quadrature form; equals value at the optimal pair.
double j_value_two_sided(const RepresentationTwoSided& rep, double x);

struct SignalDiagnostics {
  bool multistart_warning = false;
  double branch_values[4] = {0, 0, 0, 0};
};

// gamma(x): min over the four perturbation branches; stopping region is
// {gamma >= 0} and gamma = f on it.
double stopping_signal(const Payoff& payoff, const Model& model, double x,
                       const TwoSidedConfig& cfg = {},
                       SignalDiagnostics* diag = nullptr);

struct OneSidedLimitReport {
  double max_rel_dev = 0.0;
  std::vector<std::pair<double, double>> samples;  // (m, deviation)
};

// f2 on [zeta, b) vs the one-sided f_hat.
OneSidedLimitReport one_sided_limit_check(const Payoff& payoff,
                                          const Model& model,
                                          const RepresentationTwoSided& rep);

}  // namespace exsup
