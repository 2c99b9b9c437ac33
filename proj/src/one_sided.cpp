#include "exsup/one_sided.hpp"

#include <algorithm>
#include <cmath>

#include "exsup/numerics.hpp"

namespace exsup {
namespace {

bool is_kink(const Payoff& p, double x) {
  for (double k : p.kinks)
    if (std::abs(x - k) <= 1e-10 * (1.0 + std::abs(k))) return true;
  return false;
}

double reference_point(const Payoff& payoff, const Model& model) {
  double ref = model.scale.anchor;
  for (double k : payoff.kinks) ref = std::max(ref, k);
  return ref;
}

double default_x_lo(const Payoff& payoff, const Model& model) {
  double a = model.spec.a;
  double ref = reference_point(payoff, model);
  if (std::isfinite(a)) return a + 1e-4 * (ref - a);
  return ref - 30.0 * (1.0 + std::abs(ref));
}

double auto_x_hi(const Payoff& payoff, const Model& model, double x_lo) {
  double b = model.spec.b;
  auto ratio = [&](double x) { return payoff.g(x) / model.pair.psi(x); };
  if (std::isfinite(b)) return b - 1e-9 * (b - model.spec.a);
  double hi = 10.0 * std::max(1.0, reference_point(payoff, model));
  double rmax = 0.0;
  for (double x : num::geomspace(std::max(x_lo, 1e-12), hi, 200))
    rmax = std::max(rmax, ratio(x));
  if (rmax <= 0.0) throw NoPositiveSet("payoff nonpositive on search grid");
  double x = hi;
  while (ratio(x) >= 1e-12 * rmax) {
    x *= 2.0;
    if (x > 1e15)
      throw LimitViolation("g/psi does not vanish toward the right boundary");
  }
  return x;
}

}  // namespace

double value_threshold(const Payoff& payoff, const Model& model, double y,
                       double x) {
  if (payoff.g(y) < 0.0)
    throw DomainError("value_threshold: payoff negative at the threshold");
  if (x >= y) return payoff.g(x);
  return model.pair.psi(x) * payoff.g(y) / model.pair.psi(y);
}

double f_hat(const Payoff& payoff, const Model& model, double x, Side side) {
  return payoff.g(x) -
         model.pair.psi(x) * payoff.gp(x, side) / model.pair.psi_prime(x);
}

double f_hat_integral(const Payoff& payoff, const Model& model, double y_star,
                      double x, std::optional<double> boundary_term) {
  if (!(x > y_star)) throw DomainError("f_hat_integral requires x > y_star");
  double bt = 0.0;
  if (boundary_term) {
    bt = *boundary_term;
  } else if (std::isfinite(model.spec.a) &&
             (model.spec.boundary_a == Boundary::RegularKilled ||
              model.spec.boundary_a == Boundary::RegularReflected)) {
    throw BoundaryTermUnknown(
        "attainable left endpoint: supply psi'(a+)/S'(a+)");
  }
  auto psi = model.pair.psi;
  auto mp = model.scale.speed_density;
  double num_ = l_functional(1.0, 0.0, payoff, model, y_star, Side::Right);
  num_ -= num::integrate(
      [&](double t) {
        return generator_value(payoff, model, t, Side::Right) * psi(t) * mp(t);
      },
      y_star, x, payoff.kinks);
  for (double k : payoff.kinks)
    if (k > y_star && k < x)
      num_ -= psi(k) * payoff.gp_jump(k) / model.scale.scale_density(k);
  double den = model.r() * num::integrate([&](double t) { return psi(t) * mp(t); },
                                          model.spec.a, x) +
               bt;
  return num_ / den;
}

RepresentationOneSided solve_one_sided(const Payoff& payoff,
                                       const Model& model,
                                       OneSidedConfig cfg) {
  double x_lo = std::isnan(cfg.x_lo) ? default_x_lo(payoff, model) : cfg.x_lo;
  double x_hi = std::isnan(cfg.x_hi) ? auto_x_hi(payoff, model, x_lo) : cfg.x_hi;
  if (!(x_lo < x_hi)) throw DomainError("solve_one_sided: empty search window");

  std::vector<double> grid = x_lo > 0.0
                                 ? num::geomspace(x_lo, x_hi, cfg.grid_nodes)
                                 : num::linspace(x_lo, x_hi, cfg.grid_nodes);
  bool any_positive = false;
  for (double x : grid) any_positive = any_positive || payoff.g(x) > 0.0;
  if (!any_positive) throw NoPositiveSet("payoff nonpositive everywhere");

  auto fr = [&](double x) { return f_hat(payoff, model, x, Side::Right); };
  auto fl = [&](double x) { return f_hat(payoff, model, x, Side::Left); };

  // f_hat = -(psi^2/psi') d(g/psi)/dx, so the optimal threshold is where
  // g/psi peaks; refine the nonneg crossing of f_hat around the grid argmax
  std::size_t imax = 0;
  double rmax = -num::kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double ratio = payoff.g(grid[i]) / model.pair.psi(grid[i]);
    if (ratio > rmax) {
      rmax = ratio;
      imax = i;
    }
  }
  if (imax + 1 == grid.size())
    throw NoRoot("g/psi still increasing at the right truncation point");

  double y_star = num::kNaN;
  if (imax == 0) {
    y_star = grid.front();
  } else {
    // walk kink-free subintervals of the bracket
    double lo = grid[imax - 1], hi = grid[imax + 1];
    std::vector<double> cuts;
    for (double k : payoff.kinks)
      if (k > lo && k < hi) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(hi);
    double sub_lo = lo;
    for (double sub_hi : cuts) {
      if (fr(sub_lo) >= 0.0) {  // jumped nonnegative across the kink at sub_lo
        y_star = sub_lo;
        break;
      }
      if (fl(sub_hi) >= 0.0) {
        y_star = num::brent_root([&](double t) { return fr(t); }, sub_lo,
                                 sub_hi, {cfg.bisect_tol, cfg.max_iter});
        break;
      }
      sub_lo = sub_hi;
    }
    if (std::isnan(y_star)) y_star = hi;
  }

  RepresentationOneSided rep;
  rep.payoff = payoff;
  rep.model = model;
  rep.y_star = y_star;
  rep.x_hi = x_hi;
  rep.smooth_fit = !is_kink(payoff, y_star);
  rep.jump_at_boundary = rep.smooth_fit ? 0.0 : fr(y_star);

  rep.monotone_on_stop_region = true;
  double lo_scan = y_star * (y_star > 0 ? 1.0 + 1e-9 : 1.0 - 1e-9) + 1e-300;
  auto scan = lo_scan > 0.0 ? num::geomspace(lo_scan, x_hi, 200)
                            : num::linspace(lo_scan, x_hi, 200);
  double prev = fr(scan.front());
  for (std::size_t i = 1; i < scan.size(); ++i) {
    double cur = fr(scan[i]);
    if (cur < prev - 1e-9 * (1.0 + std::abs(prev))) {
      rep.monotone_on_stop_region = false;
      break;
    }
    prev = cur;
  }

  Payoff pcopy = payoff;
  Model mcopy = model;
  double ys = y_star;
  rep.f_hat = [pcopy, mcopy](double x) {
    return f_hat(pcopy, mcopy, x, Side::Right);
  };
  rep.value = [pcopy, mcopy, ys](double x) {
    return value_threshold(pcopy, mcopy, ys, x);
  };
  return rep;
}

double j_value(const RepresentationOneSided& rep, double x) {
  const Model& m = rep.model;
  double lo = std::max(x, rep.y_star);
  auto integrand = [&](double z) {
    double p = m.pair.psi(z);
    return f_hat(rep.payoff, m, z, Side::Right) * m.pair.psi_prime(z) / (p * p);
  };
  // truncate an infinite right boundary at a modest point and close with the
  // exact remainder g(X)/psi(X): the integrand equals -d(g/psi) on [y*, b),
  // so the tail telescopes
  double hi = m.spec.b;
  double rem = 0.0;
  if (!std::isfinite(hi)) {
    hi = 8.0 * std::max(lo, 1.0);
    for (double k : rep.payoff.kinks)
      if (std::isfinite(k)) hi = std::max(hi, 2.0 * k);
    while (!std::isfinite(m.pair.psi(hi)) && hi > 2.0 * lo) hi *= 0.5;
    rem = m.pair.psi(x) * rep.payoff.g(hi) / m.pair.psi(hi);
  }
  return rem + m.pair.psi(x) * num::integrate(integrand, lo, hi,
                                              rep.payoff.kinks);
}

DiagnosisReport diagnose_monotonicity(const Payoff& payoff, const Model& model,
                                      double y, double x_hi_hint) {
  DiagnosisReport rep;
  double x_hi = x_hi_hint > y ? x_hi_hint
                              : 5.0 * std::max(y, reference_point(payoff, model));
  auto grid = y > 0.0 ? num::geomspace(y, x_hi, 200)
                      : num::linspace(y, x_hi, 200);

  auto psi_second = [&](double x) {
    double s = model.spec.sigma(x);
    return 2.0 *
           (model.r() * model.pair.psi(x) -
            model.spec.mu(x) * model.pair.psi_prime(x)) /
           (s * s);
  };
  for (double x : grid) {
    if (!is_kink(payoff, x) && payoff.g_second(x) > 1e-10)
      rep.payoff_concave = false;
    if (psi_second(x) < -1e-10) rep.psi_convex = false;
  }
  // look for z < y where g/psi is locally increasing
  double a = model.spec.a;
  double z_lo = std::isfinite(a) ? a + 1e-4 * (y - a) : y - 30.0;
  double z_found = y;
  for (double z : num::linspace(z_lo, y * (1.0 - 1e-6), 200)) {
    double up = payoff.g_prime_right(z) * model.pair.psi(z) -
                payoff.g(z) * model.pair.psi_prime(z);
    if (up > 0.0) {
      rep.ratio_increasing_somewhere_below = true;
      z_found = z;
      break;
    }
  }
  for (double k : payoff.kinks)
    if (k > z_found && payoff.gp_jump(k) > 1e-12) rep.kink_condition = false;
  double prev_gen = -num::kInf;
  bool first = true;
  for (double x : grid) {
    double gv = generator_value(payoff, model, x, Side::Right);
    if (gv > 1e-10) rep.generator_nonpositive = false;
    if (!first && gv > prev_gen + 1e-10 * (1.0 + std::abs(prev_gen)))
      rep.generator_nonincreasing = false;
    prev_gen = gv;
    first = false;
  }
  double prev_f = -num::kInf;
  for (double x : grid) {
    double fv = f_hat(payoff, model, x, Side::Right);
    if (fv < prev_f - 1e-9 * (1.0 + std::abs(prev_f)))
      rep.f_hat_decreasing_at.push_back(x);
    prev_f = fv;
  }
  rep.f_hat_nondecreasing = rep.f_hat_decreasing_at.empty();
  for (double x : num::linspace(grid.front(), grid.back(), 40)) {
    double d = generator_value(payoff, model, x, Side::Right) *
                   model.pair.psi_prime(x) / model.scale.scale_density(x) +
               model.r() * l_functional(1.0, 0.0, payoff, model, x, Side::Right);
    rep.d_trace.push_back({x, d});
  }
  return rep;
}

}  // namespace exsup
