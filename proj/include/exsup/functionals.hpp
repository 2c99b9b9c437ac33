#pragma once

// The L-functional (L_u g)(x) = (g u' - g' u)/S' and its calculus:
// (L_u g)' = -(G_r g) u m', where G_r g = (1/2) sigma^2 g'' + mu g' - r g is
// the killed generator.  For payoffs with kinks the increment of L_u g over
// an interval picks up a jump u(k) (g'(k+)-g'(k-))/S'(k) at each interior
// kink k; all integral identities here carry that correction.

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "exsup/fundamental.hpp"
#include "exsup/payoff.hpp"

namespace exsup {

// G_r g at x, using the requested one-sided derivative at kinks.
double generator_value(const Payoff& payoff, const Model& model, double x,
                       Side side = Side::Right);

struct GeneratorProfile {
  std::vector<double> grid;
  std::vector<double> values;         // right-sided limits at grid points
  std::vector<double> sign_changes;   // refined by bisection
  std::optional<double> argmax;       // golden-section refined
  // maximal intervals of constant monotone direction (+1 up / -1 down)
  std::vector<std::pair<std::pair<double, double>, int>> monotone_segments;
};

GeneratorProfile generator(const Payoff& payoff, const Model& model,
                           std::span<const double> grid);

// (L_u g)(x) for u = c_psi * psi + c_phi * phi.
double l_functional(double c_psi, double c_phi, const Payoff& payoff,
                    const Model& model, double x, Side side = Side::Right);

// (L_u g)(z+) - (L_u g)(y-) evaluated as the generator integral
// int_z^y (G_r g) u m' plus interior-kink jumps; cross-checked against the
// direct endpoint difference (MismatchError on disagreement).
double l_increment(double c_psi, double c_phi, const Payoff& payoff,
                   const Model& model, double z, double y);

// R(z,y) = [(L_u g)(z) - (L_u g)(y)] / [(L_u 1)(z) - (L_u 1)(y)], independent
// of u; collapses to -(G_r g)/r at the midpoint as y -> z.  Requires a
// kink-free closed interval [z, y].
double ratio_r(const Payoff& payoff, const Model& model, double z, double y);

// (R_r pi)(x) through the Green kernel.
double resolvent(const std::function<double(double)>& pi, const Model& model,
                 double x);

// Payoff g = R_r pi with derivatives from the kernel; G_r g = -pi.
// Uses memoized partial integrals, so copies share a growing cache.
Payoff make_resolvent_payoff(std::function<double(double)> pi,
                             const Model& model);

}  // namespace exsup
