#include "exsup/fundamental.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "exsup/kummer.hpp"
#include "exsup/numerics.hpp"

namespace exsup {
namespace {

struct Kappas {
  double plus, minus;
};

// roots of kappa^2 + (q - 1) kappa - 2r/sigma^2 = 0, q = 2 mu / sigma^2
Kappas characteristic_roots(double mu, double sigma, double r) {
  if (!(sigma > 0.0)) throw ParamError("sigma must be positive");
  if (!(r > 0.0)) throw ParamError("discount rate must be positive");
  double s2 = sigma * sigma;
  double q = 2.0 * mu / s2;
  double half = 0.5 * (1.0 - q);
  double disc = std::sqrt(half * half + 2.0 * r / s2);
  return {half + disc, half - disc};
}

DiffusionSpec linear_noise_spec(std::function<double(double)> mu, double sigma,
                                double r) {
  DiffusionSpec spec;
  spec.mu = std::move(mu);
  spec.sigma = [sigma](double x) { return sigma * x; };
  spec.a = 0.0;
  spec.b = num::kInf;
  spec.boundary_a = Boundary::Natural;
  spec.boundary_b = Boundary::Natural;
  spec.r = r;
  return spec;
}

// Cubic Hermite data for log u; monotone positive solutions interpolate
// far more accurately in log space.
struct LogCurve {
  std::vector<double> x, l, d;  // node, log u, (log u)'
  double l_ref = 0.0;

  double eval_log(double q, double* dlog) const {
    if (!(q >= x.front() && q <= x.back()))
      throw DomainError("numeric fundamental solution queried outside stored range");
    auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t i = (it == x.begin()) ? 0 : (it - x.begin() - 1);
    if (i + 1 >= x.size()) i = x.size() - 2;
    double h = x[i + 1] - x[i], t = (q - x[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    double val = h00 * l[i] + h10 * h * d[i] + h01 * l[i + 1] + h11 * h * d[i + 1];
    if (dlog) {
      double g00 = 6 * t * (t - 1) / h, g10 = (1 - t) * (1 - 3 * t);
      double g01 = -6 * t * (t - 1) / h, g11 = t * (3 * t - 2);
      *dlog = g00 * l[i] + g10 * d[i] + g01 * l[i + 1] + g11 * d[i + 1];
    }
    return val;
  }
};

using State = std::array<double, 2>;  // (u, w = u'/S')

// Shoot from x_nodes.front() to x_nodes.back() (either direction) and store
// log-space Hermite data.  Throws MonotonicityFailure if u is not monotone.
LogCurve shoot(const ScaleSpeed& scale, double r,
               const std::vector<double>& x_nodes, State init, bool increasing) {
  namespace ode = boost::numeric::odeint;
  auto Sp = scale.scale_density;
  auto mp = scale.speed_density;
  auto sys = [&](const State& s, State& ds, double x) {
    ds[0] = Sp(x) * s[1];
    ds[1] = r * mp(x) * s[0];
  };
  auto stepper = ode::make_controlled(1e-13, 1e-11,
                                      ode::runge_kutta_dopri5<State>());
  LogCurve curve;
  State s = init;
  double offset = 0.0;
  double prev_l = -num::kInf;
  for (std::size_t i = 0; i < x_nodes.size(); ++i) {
    if (i > 0) {
      double from = x_nodes[i - 1], to = x_nodes[i];
      double dt = (to - from) / 8.0;
      try {
        ode::integrate_adaptive(stepper, sys, s, from, to, dt);
      } catch (const std::exception& e) {
        throw ODEFailure(std::string("fundamental pair shooting failed: ") +
                         e.what());
      }
      if (std::abs(s[0]) > 1e120) {  // renormalize; only ratios matter
        offset += std::log(1e120);
        s[0] /= 1e120;
        s[1] /= 1e120;
      }
    }
    if (!(s[0] > 0.0)) {
      if (i == 0) continue;  // killed start u = 0: begin storage one node in
      throw MonotonicityFailure("fundamental solution lost positivity");
    }
    double l = std::log(s[0]) + offset;
    if (!curve.x.empty() && !(l > prev_l))
      throw MonotonicityFailure("fundamental solution not strictly monotone");
    curve.x.push_back(x_nodes[i]);
    curve.l.push_back(l);
    curve.d.push_back(Sp(x_nodes[i]) * s[1] / s[0]);
    prev_l = l;
  }
  if (curve.x.size() < 4) throw ODEFailure("too few usable nodes stored");
  if (!increasing) {  // phi was integrated downward; store ascending in x
    std::reverse(curve.x.begin(), curve.x.end());
    std::reverse(curve.l.begin(), curve.l.end());
    std::reverse(curve.d.begin(), curve.d.end());
  }
  return curve;
}

std::function<double(double)> curve_value(std::shared_ptr<LogCurve> c) {
  return [c](double x) { return std::exp(c->eval_log(x, nullptr) - c->l_ref); };
}

std::function<double(double)> curve_deriv(std::shared_ptr<LogCurve> c) {
  return [c](double x) {
    double dl = 0.0;
    double l = c->eval_log(x, &dl);
    return std::exp(l - c->l_ref) * dl;
  };
}

}  // namespace

FundamentalPair make_gbm_pair(double mu, double sigma, double r) {
  if (!(r > mu))
    throw ParamError("GBM pair requires r > mu (otherwise x/psi(x) "
                     "does not vanish at infinity)");
  auto [kp, km] = characteristic_roots(mu, sigma, r);
  FundamentalPair pair;
  pair.psi = [kp](double x) { return std::pow(x, kp); };
  pair.phi = [km](double x) { return std::pow(x, km); };
  pair.psi_prime = [kp](double x) { return kp * std::pow(x, kp - 1.0); };
  pair.phi_prime = [km](double x) { return km * std::pow(x, km - 1.0); };
  // with S'(x) = x^{-q} (anchor 1): (psi' phi - phi' psi) / S' = kp - km
  pair.wronskian_B = kp - km;
  pair.source = PairSource::AnalyticGBM;
  return pair;
}

FundamentalPair make_logistic_pair(double mu, double gamma, double sigma,
                                   double r, double kummer_precision) {
  if (!(gamma > 0.0)) throw ParamError("logistic pair requires gamma > 0");
  auto [kp, km] = characteristic_roots(mu, sigma, r);
  double theta = 2.0 * mu * gamma / (sigma * sigma);
  double bp = 1.0 + kp - km, bm = 1.0 - kp + km;
  KummerOptions kopt{kummer_precision, 10000};
  auto branch = [theta, kopt](double k, double b) {
    auto value = [=](double x) {
      return std::pow(x, k) * kummer_m(k, b, theta * x, kopt);
    };
    auto deriv = [=](double x) {
      return k * std::pow(x, k - 1.0) * kummer_m(k, b, theta * x, kopt) +
             std::pow(x, k) * theta * kummer_m_derivative(k, b, theta * x, kopt);
    };
    return std::pair{std::function<double(double)>(value),
                     std::function<double(double)>(deriv)};
  };
  FundamentalPair pair;
  std::tie(pair.psi, pair.psi_prime) = branch(kp, bp);
  std::tie(pair.phi, pair.phi_prime) = branch(km, bm);
  // S'(1) = 1 normalization
  pair.wronskian_B =
      pair.psi_prime(1.0) * pair.phi(1.0) - pair.phi_prime(1.0) * pair.psi(1.0);
  pair.source = PairSource::AnalyticLogistic;
  return pair;
}

FundamentalPair make_numeric_pair(const DiffusionSpec& spec,
                                  const ScaleSpeed& scale,
                                  const ODEConfig& cfg) {
  if (spec.boundary_a == Boundary::RegularReflected ||
      spec.boundary_b == Boundary::RegularReflected)
    throw NotSupported("reflected boundaries are not supported by the "
                       "numeric fundamental pair");
  if (!(spec.a < cfg.x_lo && cfg.x_lo < cfg.x_hi && cfg.x_hi < spec.b) &&
      !(spec.a <= cfg.x_lo && cfg.x_lo < cfg.x_hi && cfg.x_hi <= spec.b &&
        std::isfinite(cfg.x_lo) && std::isfinite(cfg.x_hi)))
    throw DomainError("ODE truncation interval must be finite and inside (a,b)");
  if (!(cfg.x_ref > cfg.x_lo && cfg.x_ref < cfg.x_hi))
    throw DomainError("x_ref must lie inside the truncation interval");

  std::vector<double> nodes =
      cfg.x_lo > 0.0 ? num::geomspace(cfg.x_lo, cfg.x_hi, cfg.n_nodes)
                     : num::linspace(cfg.x_lo, cfg.x_hi, cfg.n_nodes);

  State psi_init = spec.boundary_a == Boundary::Entrance ? State{1.0, 0.0}
                                                         : State{0.0, 1.0};
  State phi_init = spec.boundary_b == Boundary::Entrance ? State{1.0, 0.0}
                                                         : State{0.0, -1.0};
  auto psi_curve = std::make_shared<LogCurve>(
      shoot(scale, spec.r, nodes, psi_init, /*increasing=*/true));
  std::vector<double> rnodes(nodes.rbegin(), nodes.rend());
  auto phi_raw = shoot(scale, spec.r, rnodes, phi_init, /*increasing=*/false);
  // downward shooting makes u increase as x decreases; as a function of x the
  // stored l must be decreasing, which `shoot` verified in integration order.
  auto phi_curve = std::make_shared<LogCurve>(std::move(phi_raw));

  psi_curve->l_ref = psi_curve->eval_log(cfg.x_ref, nullptr);
  phi_curve->l_ref = phi_curve->eval_log(cfg.x_ref, nullptr);

  FundamentalPair pair;
  pair.psi = curve_value(psi_curve);
  pair.phi = curve_value(phi_curve);
  pair.psi_prime = curve_deriv(psi_curve);
  pair.phi_prime = curve_deriv(phi_curve);
  pair.source = PairSource::NumericODE;
  pair.wronskian_B =
      (pair.psi_prime(cfg.x_ref) * pair.phi(cfg.x_ref) -
       pair.phi_prime(cfg.x_ref) * pair.psi(cfg.x_ref)) /
      scale.scale_density(cfg.x_ref);
  return pair;
}

namespace {

Model finish_model(DiffusionSpec spec, ScaleSpeed scale, FundamentalPair pair,
                   std::optional<GbmCoeffs> gbm) {
  // make B consistent with the scale normalization actually in use
  double x0 = scale.anchor;
  pair.wronskian_B = (pair.psi_prime(x0) * pair.phi(x0) -
                      pair.phi_prime(x0) * pair.psi(x0)) /
                     scale.scale_density(x0);
  return Model{std::move(spec), std::move(scale), std::move(pair), gbm};
}

}  // namespace

Model make_gbm_model(double mu, double sigma, double r, double anchor) {
  auto spec = linear_noise_spec([mu](double x) { return mu * x; }, sigma, r);
  double q = 2.0 * mu / (sigma * sigma);
  auto scale = scale_from_antiderivative(
      [q](double x) { return q * std::log(x); }, spec.sigma, anchor);
  return finish_model(spec, scale, make_gbm_pair(mu, sigma, r),
                      GbmCoeffs{mu, sigma});
}

Model make_logistic_model(double mu, double gamma, double sigma, double r,
                          double anchor, double kummer_precision) {
  auto spec = linear_noise_spec(
      [mu, gamma](double x) { return mu * x * (1.0 - gamma * x); }, sigma, r);
  double q = 2.0 * mu / (sigma * sigma);
  auto scale = scale_from_antiderivative(
      [q, gamma](double x) { return q * (std::log(x) - gamma * x); },
      spec.sigma, anchor);
  return finish_model(spec, scale,
                      make_logistic_pair(mu, gamma, sigma, r, kummer_precision),
                      std::nullopt);
}

Model make_custom_model(DiffusionSpec spec, ScaleSpeed scale,
                        FundamentalPair pair) {
  return finish_model(std::move(spec), std::move(scale), std::move(pair),
                      std::nullopt);
}

}  // namespace exsup
