#pragma once

// Distribution of the running extrema (M_T, I_T) of the diffusion killed at
// an independent Exp(r) time, and the Monte Carlo machinery used to verify
// the representation identities by simulation:
//   P_x(M_T <= m) = 1 - psi(x)/psi(m),   P_x(I_T <= i) = phi(x)/phi(i),
//   P_x(I_T <= i, M_T <= m)
//     = -psi(x)/psi(m) + phi_hat_m(x)/phi_hat_m(i) + psi_hat_i(x)/psi_hat_i(m).

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "exsup/fundamental.hpp"

namespace exsup {

double sup_cdf(const Model& model, double x, double m);
double inf_cdf(const Model& model, double x, double i);
double joint_cdf(const Model& model, double x, double i, double m);
// P_x(I_T >= i, M_T <= m) = 1 - psi_hat_i(x)/psi_hat_i(m) - phi_hat_m(x)/phi_hat_m(i)
double interior_sup_prob(const Model& model, double x, double i, double m);

// Mixed densities of the expected-supremum quadrature: given the matching
// level y (resp. z), the (I_T in di, M_T < y) and (M_T in dm, I_T > z) parts.
double density_inf_given_cap(const Model& model, double x, double i, double y);
double density_sup_given_floor(const Model& model, double x, double m, double z);

// Law of the killed-time position given the running maximum:
// P_x[X_T in dy | M_T = v, I_T > i] = r psi_hat_i(y) m'(y) dy / (psi_hat_i'(v)/S'(v) - B)
double conditional_density_given_sup(const Model& model, double i, double v,
                                     double y);
double conditional_density_given_inf(const Model& model, double v, double i,
                                     double y);
// E[h(X_T) | M_T = v, I_T > i] by quadrature against the density above.
double conditional_expectation_given_sup(const Model& model, double i, double v,
                                         const std::function<double(double)>& h);

enum class Scheme { ExactGBM, EulerMaruyama };

struct PathSimConfig {
  Scheme scheme = Scheme::ExactGBM;
  double dt = 1e-3;
  std::int64_t n_paths = 100000;
  std::uint64_t seed = 1;
  bool antithetic = false;
  int n_threads = 1;
};

struct SimEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
  std::int64_t n_discarded = 0;
  // running-extremum shortcut f1(I_T) v f2(M_T) when curves were supplied
  double shortcut_estimate = std::numeric_limits<double>::quiet_NaN();
  double shortcut_std_error = std::numeric_limits<double>::quiet_NaN();
};

// E_x[ sup_{t <= T} f(X_t) 1{X_t in stopping region} ] with T ~ Exp(r)
// sampled once per path.  ExactGBM steps the log-process exactly and applies
// a per-step Brownian-bridge max/min correction; EulerMaruyama is uncorrected
// (documented low bias for running extrema).
SimEstimate simulate_expected_sup(
    const std::function<double(double)>& f,
    const std::function<bool(double)>& in_region, const Model& model, double x,
    const PathSimConfig& cfg,
    const std::function<double(double)>* f_lower = nullptr,  // at I_T
    const std::function<double(double)>* f_upper = nullptr); // at M_T

struct LawProbe {
  double i = 0.0, m = 0.0;
};

struct LawProbeResult {
  LawProbe probe;
  bool valid = false;
  std::string reason;  // when invalid
  double model_joint = 0.0, empirical_joint = 0.0, se_joint = 0.0;
  double model_sup = 0.0, empirical_sup = 0.0, se_sup = 0.0;
  double model_inf = 0.0, empirical_inf = 0.0, se_inf = 0.0;
  bool within_bounds = false;  // all three within 3 s.e. + allowance
};

struct LawReport {
  std::vector<LawProbeResult> probes;
  std::int64_t n_paths = 0;
  std::int64_t n_discarded = 0;
  bool all_within_bounds = true;
};

// Empirical frequencies of {I_T <= i, M_T <= m} and the marginals against
// the closed-form laws; allowance absorbs residual discretization bias.
LawReport empirical_law_check(const Model& model, double x,
                              const std::vector<LawProbe>& probes,
                              const PathSimConfig& cfg, double allowance = 0.0);

}  // namespace exsup
