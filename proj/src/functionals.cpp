#include "exsup/functionals.hpp"

#include <cmath>
#include <memory>

#include "exsup/numerics.hpp"

namespace exsup {
namespace {

bool near_kink(const Payoff& p, double x, double& kink) {
  for (double k : p.kinks)
    if (std::abs(x - k) <= 1e-12 * (1.0 + std::abs(k))) {
      kink = k;
      return true;
    }
  return false;
}

}  // namespace

double generator_value(const Payoff& payoff, const Model& model, double x,
                       Side side) {
  double s = model.spec.sigma(x);
  double k;
  double xs = x;
  if (near_kink(payoff, x, k))  // g'' is defined off the kink set
    xs = side == Side::Right ? k + 1e-9 * (1.0 + std::abs(k))
                             : k - 1e-9 * (1.0 + std::abs(k));
  return 0.5 * s * s * payoff.g_second(xs) +
         model.spec.mu(x) * payoff.gp(x, side) - model.r() * payoff.g(x);
}

GeneratorProfile generator(const Payoff& payoff, const Model& model,
                           std::span<const double> grid) {
  GeneratorProfile prof;
  prof.grid.assign(grid.begin(), grid.end());
  prof.values.reserve(grid.size());
  for (double x : grid)
    prof.values.push_back(generator_value(payoff, model, x, Side::Right));

  auto gen = [&](double x) {
    return generator_value(payoff, model, x, Side::Right);
  };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (prof.values[i] == 0.0) prof.sign_changes.push_back(grid[i]);
    if (prof.values[i] * prof.values[i + 1] < 0.0) {
      // don't bisect across a kink: the sign may flip by a jump there
      if (payoff.has_kink_in(grid[i], grid[i + 1])) {
        double kink = payoff.kinks.front();
        for (double k : payoff.kinks)
          if (k > grid[i] && k < grid[i + 1]) kink = k;
        prof.sign_changes.push_back(kink);
      } else {
        prof.sign_changes.push_back(num::brent_root(gen, grid[i], grid[i + 1]));
      }
    }
  }

  std::size_t imax = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (prof.values[i] > prof.values[imax]) imax = i;
  if (imax > 0 && imax + 1 < grid.size() &&
      !payoff.has_kink_in(grid[imax - 1], grid[imax + 1]))
    prof.argmax = num::golden_min([&](double x) { return -gen(x); },
                                  grid[imax - 1], grid[imax + 1]);
  else
    prof.argmax = grid[imax];

  int dir = 0;
  double seg_start = grid.front();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    int d = prof.values[i + 1] > prof.values[i]
                ? 1
                : (prof.values[i + 1] < prof.values[i] ? -1 : dir);
    if (dir == 0) dir = d;
    if (d != dir) {
      prof.monotone_segments.push_back({{seg_start, grid[i]}, dir});
      seg_start = grid[i];
      dir = d;
    }
  }
  prof.monotone_segments.push_back({{seg_start, grid.back()}, dir == 0 ? 1 : dir});
  return prof;
}

double l_functional(double c_psi, double c_phi, const Payoff& payoff,
                    const Model& model, double x, Side side) {
  double u = c_psi * model.pair.psi(x) + c_phi * model.pair.phi(x);
  double du = c_psi * model.pair.psi_prime(x) + c_phi * model.pair.phi_prime(x);
  double sp = model.scale.scale_density(x);
  return (payoff.g(x) * du - payoff.gp(x, side) * u) / sp;
}

double l_increment(double c_psi, double c_phi, const Payoff& payoff,
                   const Model& model, double z, double y) {
  if (!(z < y)) throw DomainError("l_increment requires z < y");
  auto u = [&](double t) {
    return c_psi * model.pair.psi(t) + c_phi * model.pair.phi(t);
  };
  auto integrand = [&](double t) {
    return generator_value(payoff, model, t, Side::Right) * u(t) *
           model.scale.speed_density(t);
  };
  double value = num::integrate(integrand, z, y, payoff.kinks);
  for (double k : payoff.kinks)
    if (k > z && k < y)
      value += u(k) * payoff.gp_jump(k) / model.scale.scale_density(k);

  double direct = l_functional(c_psi, c_phi, payoff, model, z, Side::Right) -
                  l_functional(c_psi, c_phi, payoff, model, y, Side::Left);
  double scale = std::max({std::abs(value), std::abs(direct), 1e-12});
  if (std::abs(value - direct) > 1e-6 * scale)
    throw MismatchError("l_increment: generator integral and endpoint "
                        "difference disagree");
  return value;
}

double ratio_r(const Payoff& payoff, const Model& model, double z, double y) {
  if (!(z <= y)) std::swap(z, y);
  if (payoff.has_kink_in(z - 1e-12, y + 1e-12))
    throw DomainError("ratio_r requires a kink-free interval");
  double mid = 0.5 * (z + y);
  if (y - z <= 1e-8 * (1.0 + std::abs(mid)))
    return -generator_value(payoff, model, mid, Side::Right) / model.r();
  auto lg = [&](double x) {
    return l_functional(1.0, 0.0, payoff, model, x, Side::Right);
  };
  auto l1 = [&](double x) {
    return model.pair.psi_prime(x) / model.scale.scale_density(x);
  };
  double den = l1(z) - l1(y);
  double num_ = lg(z) - lg(y);
  double den_scale = std::max(std::abs(l1(z)), std::abs(l1(y)));
  if (std::abs(den) < 1e-13 * std::max(1.0, den_scale))
    throw DegenerateDenominator("ratio_r: denominator vanishes");
  return num_ / den;
}

double resolvent(const std::function<double(double)>& pi, const Model& model,
                 double x) {
  auto psi = model.pair.psi;
  auto phi = model.pair.phi;
  auto mp = model.scale.speed_density;
  double lo = num::integrate(
      [&](double t) { return psi(t) * pi(t) * mp(t); }, model.spec.a, x);
  double hi = num::integrate(
      [&](double t) { return phi(t) * pi(t) * mp(t); }, x, model.spec.b);
  return (phi(x) * lo + psi(x) * hi) / model.pair.wronskian_B;
}

Payoff make_resolvent_payoff(std::function<double(double)> pi,
                             const Model& model) {
  auto psi = model.pair.psi;
  auto phi = model.pair.phi;
  auto psi_p = model.pair.psi_prime;
  auto phi_p = model.pair.phi_prime;
  auto mp = model.scale.speed_density;
  double B = model.pair.wronskian_B;
  double a = model.spec.a, b = model.spec.b;
  double anchor = model.scale.anchor;

  auto m_lo = std::make_shared<num::MemoizedIntegral>(
      [=](double t) { return psi(t) * pi(t) * mp(t); }, anchor);
  auto m_hi = std::make_shared<num::MemoizedIntegral>(
      [=](double t) { return phi(t) * pi(t) * mp(t); }, anchor);
  // I1(x) = int_a^x psi pi m',  I2(x) = int_x^b phi pi m'
  auto I1 = [=](double x) { return (*m_lo)(x) - (*m_lo)(a); };
  auto I2 = [=](double x) { return (*m_hi)(b) - (*m_hi)(x); };

  Payoff p;
  p.kind = PayoffKind::Resolvent;
  p.g = [=](double x) { return (phi(x) * I1(x) + psi(x) * I2(x)) / B; };
  // the kernel-derivative terms cancel by construction
  p.g_prime_right = [=](double x) {
    return (phi_p(x) * I1(x) + psi_p(x) * I2(x)) / B;
  };
  p.g_prime_left = p.g_prime_right;
  auto g = p.g;
  auto gp = p.g_prime_right;
  auto mu = model.spec.mu;
  auto sigma = model.spec.sigma;
  double r = model.r();
  // G_r g = -pi  =>  g'' = 2 (r g - mu g' - pi) / sigma^2
  p.g_second = [=](double x) {
    double s = sigma(x);
    return 2.0 * (r * g(x) - mu(x) * gp(x) - pi(x)) / (s * s);
  };
  return p;
}

}  // namespace exsup
