#include "exsup/two_sided.hpp"

#include <algorithm>
#include <cmath>

#include "exsup/numerics.hpp"
#include "exsup/one_sided.hpp"

namespace exsup {
namespace {

struct Ctx {
  const Payoff& p;
  const Model& m;
  double B;
  double r;

  double psi(double x) const { return m.pair.psi(x); }
  double phi(double x) const { return m.pair.phi(x); }
  double dpsi(double x) const { return m.pair.psi_prime(x); }
  double dphi(double x) const { return m.pair.phi_prime(x); }
  double Sp(double x) const { return m.scale.scale_density(x); }
  double mp(double x) const { return m.scale.speed_density(x); }

  double psi_hat(double z, double x) const {
    return psi(x) * phi(z) - psi(z) * phi(x);
  }
  double phi_hat(double y, double x) const {
    return phi(x) * psi(y) - phi(y) * psi(x);
  }
  double psi_hat_dx(double z, double x) const {
    return dpsi(x) * phi(z) - psi(z) * dphi(x);
  }
  double phi_hat_dx(double y, double x) const {
    return dphi(x) * psi(y) - phi(y) * dpsi(x);
  }

  double Lpsi(double x, Side s) const {
    return l_functional(1.0, 0.0, p, m, x, s);
  }
  double Lphi(double x, Side s) const {
    return l_functional(0.0, 1.0, p, m, x, s);
  }

  // kink-corrected integral of (G_r g) u m' over (z, y)
  double gen_integral(const std::function<double(double)>& u, double z,
                      double y) const {
    double v = num::integrate(
        [&](double t) {
          return generator_value(p, m, t, Side::Right) * u(t) * mp(t);
        },
        z, y, p.kinks);
    for (double k : p.kinks)
      if (k > z && k < y) v += u(k) * p.gp_jump(k) / Sp(k);
    return v;
  }
};

double reference_scale(const Payoff& p, const Model& m) {
  double ref = std::abs(m.scale.anchor);
  for (double k : p.kinks) ref = std::max(ref, std::abs(k));
  return std::max(ref, 1.0);
}

double default_z_lo(const Payoff& p, const Model& m) {
  double a = m.spec.a;
  if (std::isfinite(a)) return a + 1e-4 * (reference_scale(p, m) - a);
  return -30.0 * reference_scale(p, m);
}

double default_y_hi(const Payoff& p, const Model& m) {
  double b = m.spec.b;
  if (std::isfinite(b)) return b - 1e-9 * (b - m.spec.a);
  return 50.0 * reference_scale(p, m);
}

double default_a_trunc(const Payoff& p, const Model& m, double z_star) {
  // phi typically blows up toward a; stop while the dynamic range of the
  // integrands is still manageable (the neglected tail carries weight
  // phi(x)/phi(a_trunc), already negligible at this depth)
  double a = m.spec.a;
  if (std::isfinite(a)) return a + 3e-3 * (z_star - a);
  return z_star - 30.0 * reference_scale(p, m);
}

// positive block [x0, x1] of the generator, counting convex kinks (upward
// g'-jumps) as positivity atoms; ShapeViolation unless exactly one block.
std::pair<double, double> generator_block(const Ctx& c, double lo, double hi) {
  std::vector<double> pts =
      lo > 0.0 ? num::geomspace(lo, hi, 400) : num::linspace(lo, hi, 400);
  for (double k : c.p.kinks)
    if (k > lo && k < hi) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, bool>> sign;  // (x, positive)
  for (double x : pts) {
    bool pos = generator_value(c.p, c.m, x, Side::Right) > 0.0 ||
               generator_value(c.p, c.m, x, Side::Left) > 0.0;
    for (double k : c.p.kinks)
      if (std::abs(x - k) <= 1e-12 * (1.0 + std::abs(k)) && c.p.gp_jump(k) > 0.0)
        pos = true;  // convex kink: generator atom
    sign.push_back({x, pos});
  }
  double x0 = num::kNaN, x1 = num::kNaN;
  int blocks = 0;
  for (std::size_t i = 0; i < sign.size(); ++i) {
    if (sign[i].second && (i == 0 || !sign[i - 1].second)) {
      ++blocks;
      if (blocks == 1) x0 = sign[i].first;
    }
    if (sign[i].second) {
      if (blocks == 1) x1 = sign[i].first;
    }
  }
  if (blocks == 0)
    throw ShapeViolation("generator has no positive set: nothing to wait for");
  if (blocks > 1)
    throw ShapeViolation("generator positive set is not a single interval");
  return {x0, x1};
}

// largest kink beyond which the payoff is flat (cap point), if any
std::optional<double> cap_point(const Payoff& p) {
  if (p.kinks.empty()) return std::nullopt;
  double k = p.kinks.back();
  if (p.g_prime_right(k) == 0.0 && p.g_prime_right(k + 1.0) == 0.0 &&
      p.g(k + 1.0) == p.g(k))
    return k;
  return std::nullopt;
}

}  // namespace

TwoSidedValueCoeffs value_coeffs(const Payoff& payoff, const Model& model) {
  auto psi = model.pair.psi;
  auto phi = model.pair.phi;
  auto g = payoff.g;
  auto A1 = [=](double z, double y) {
    double D = psi(y) * phi(z) - psi(z) * phi(y);
    return (psi(y) * g(z) - g(y) * psi(z)) / D;
  };
  auto A2 = [=](double z, double y) {
    double D = psi(y) * phi(z) - psi(z) * phi(y);
    return (phi(z) * g(y) - g(z) * phi(y)) / D;
  };
  return {A1, A2};
}

double value_two_sided(const Payoff& payoff, const Model& model, double z,
                       double y, double x) {
  if (!(model.spec.a < z && z < y && y < model.spec.b))
    throw DomainError("value_two_sided: need a < z < y < b");
  if (x <= z || x >= y) return payoff.g(x);
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  return payoff.g(z) * c.phi_hat(y, x) / c.phi_hat(y, z) +
         payoff.g(y) * c.psi_hat(z, x) / c.psi_hat(z, y);
}

double h_function(const Payoff& payoff, const Model& model, double z,
                  double y) {
  if (z == y) return 0.0;
  if (!(z < y)) throw DomainError("h_function: need z <= y");
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double P = c.dpsi(y) / c.Sp(y) - c.dpsi(z) / c.Sp(z);
  double Q = c.dphi(y) / c.Sp(y) - c.dphi(z) / c.Sp(z);
  auto u1 = [&](double t) { return c.phi(t) * P - c.psi(t) * Q; };
  return c.gen_integral(u1, z, y);
}

double h_partial_y(const Payoff& payoff, const Model& model, double z,
                   double y) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double P = c.dpsi(y) / c.Sp(y) - c.dpsi(z) / c.Sp(z);
  double Q = c.dphi(y) / c.Sp(y) - c.dphi(z) / c.Sp(z);
  double u1_y = c.phi(y) * P - c.psi(y) * Q;
  auto phih = [&](double t) { return c.phi_hat(y, t); };
  return c.r * c.mp(y) * c.gen_integral(phih, z, y) +
         generator_value(payoff, model, y, Side::Left) * u1_y * c.mp(y);
}

double h_partial_z(const Payoff& payoff, const Model& model, double z,
                   double y) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double P = c.dpsi(y) / c.Sp(y) - c.dpsi(z) / c.Sp(z);
  double Q = c.dphi(y) / c.Sp(y) - c.dphi(z) / c.Sp(z);
  double u1_z = c.phi(z) * P - c.psi(z) * Q;
  auto psih = [&](double t) { return c.psi_hat(z, t); };
  return c.r * c.mp(z) * c.gen_integral(psih, z, y) -
         generator_value(payoff, model, z, Side::Right) * u1_z * c.mp(z);
}

double h1_closed(const Payoff& payoff, const Model& model, double x, double y,
                 Side side_at_x) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double bs = c.B * c.Sp(x);
  double num_ = payoff.g(x) * c.phi_hat_dx(y, x) -
                payoff.gp(x, side_at_x) * c.phi_hat(y, x) + bs * payoff.g(y);
  double den = c.phi_hat_dx(y, x) + bs;
  if (std::abs(den) < 1e-300) throw DegenerateDenominator("h1: zero denominator");
  return num_ / den;
}

double h2_closed(const Payoff& payoff, const Model& model, double x, double z,
                 Side side_at_x) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double bs = c.B * c.Sp(x);
  double num_ = c.psi_hat_dx(z, x) * payoff.g(x) -
                payoff.gp(x, side_at_x) * c.psi_hat(z, x) - bs * payoff.g(z);
  double den = c.psi_hat_dx(z, x) - bs;
  if (std::abs(den) < 1e-300) throw DegenerateDenominator("h2: zero denominator");
  return num_ / den;
}

double f1_integral(const Payoff& payoff, const Model& model, double z,
                   double y) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  auto phih = [&](double t) { return c.phi_hat(y, t); };
  double num_ = c.gen_integral(phih, z, y);
  double den = c.r * num::integrate(
                         [&](double t) { return phih(t) * c.mp(t); }, z, y);
  return -num_ / den;
}

double f2_integral(const Payoff& payoff, const Model& model, double z,
                   double y) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  auto psih = [&](double t) { return c.psi_hat(z, t); };
  double num_ = c.gen_integral(psih, z, y);
  double den = c.r * num::integrate(
                         [&](double t) { return psih(t) * c.mp(t); }, z, y);
  return -num_ / den;
}

namespace {

// solve (L_psi g)(z) = (L_psi g)(y) for y in (y_lo, y_hi); nullopt if the
// residual does not change sign on the scan grid
std::optional<double> solve_y_of_z(const Ctx& c, double z, double y_lo,
                                   double y_hi, double tol) {
  double target = c.Lpsi(z, Side::Right);
  auto res = [&](double y) { return target - c.Lpsi(y, Side::Left); };
  auto grid = y_lo > 0.0 ? num::geomspace(y_lo, y_hi, 200)
                         : num::linspace(y_lo, y_hi, 200);
  double prev = res(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double cur = res(grid[i]);
    if (prev == 0.0) return grid[i - 1];
    if (prev * cur < 0.0)
      return num::brent_root(res, grid[i - 1], grid[i], {tol, 300});
    prev = cur;
  }
  return std::nullopt;
}

}  // namespace

std::pair<double, double> solve_optimal_pair(const Payoff& payoff,
                                             const Model& model,
                                             const TwoSidedConfig& cfg,
                                             bool* corner_upper) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double z_lo = std::isnan(cfg.z_lo) ? default_z_lo(payoff, model) : cfg.z_lo;
  double y_hi = std::isnan(cfg.y_hi) ? default_y_hi(payoff, model) : cfg.y_hi;
  auto [x0, x1] = generator_block(c, z_lo, y_hi);
  if (corner_upper) *corner_upper = false;

  double z_hi = x0 * (x0 > 0 ? 1.0 - 1e-9 : 1.0 + 1e-9);
  double y_lo = x1 * (x1 > 0 ? 1.0 + 1e-9 : 1.0 - 1e-9);
  auto cap = cap_point(payoff);

  // interior (smooth-fit on both sides) attempt
  auto zgrid = z_lo > 0.0 ? num::geomspace(z_lo, z_hi, cfg.search_nodes)
                          : num::linspace(z_lo, z_hi, cfg.search_nodes);
  auto e2 = [&](double z) -> std::optional<double> {
    auto y = solve_y_of_z(c, z, y_lo, y_hi, cfg.root_tol);
    if (!y) return std::nullopt;
    if (cap && *y >= *cap - 1e-12 * (1.0 + std::abs(*cap)))
      return std::nullopt;  // only roots below the cap count as interior
    return c.Lphi(z, Side::Right) - c.Lphi(*y, Side::Left);
  };
  double prev_z = num::kNaN, prev_e2 = num::kNaN;
  for (double z : zgrid) {
    auto v = e2(z);
    if (!v) {
      prev_z = num::kNaN;
      continue;
    }
    if (!std::isnan(prev_z) && prev_e2 * (*v) < 0.0) {
      double z_star = num::brent_root(
          [&](double t) {
            auto w = e2(t);
            if (!w) throw RootLost("interior y-root lost during z-bisection");
            return *w;
          },
          prev_z, z, {cfg.root_tol, 300});
      double y_star = *solve_y_of_z(c, z_star, y_lo, y_hi, cfg.root_tol);
      if (!(z_star < y_star)) throw ShapeViolation("boundaries out of order");
      return {z_star, y_star};
    }
    prev_z = z;
    prev_e2 = *v;
  }

  // corner branch: payoff flat beyond a cap point, smooth fit at z only
  if (cap) {
    double y = *cap;
    auto coeffs = value_coeffs(payoff, model);
    auto res = [&](double z) {
      return coeffs.A1(z, y) * c.dphi(z) + coeffs.A2(z, y) * c.dpsi(z) -
             payoff.g_prime_right(z);
    };
    double hi = std::min(z_hi, y * (1.0 - 1e-9));
    auto grid = z_lo > 0.0 ? num::geomspace(z_lo, hi, cfg.search_nodes)
                           : num::linspace(z_lo, hi, cfg.search_nodes);
    double prev = res(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
      double cur = res(grid[i]);
      if (prev * cur < 0.0) {
        double z_star =
            num::brent_root(res, grid[i - 1], grid[i], {cfg.root_tol, 300});
        if (corner_upper) *corner_upper = true;
        return {z_star, y};
      }
      prev = cur;
    }
  }
  throw NoInteriorRoot("neither the interior system nor a corner branch closes");
}

std::pair<TabulatedCurve, double> trace_beta(const Payoff& payoff,
                                             const Model& model, double z_star,
                                             double y_star, bool corner_upper,
                                             const TwoSidedConfig& cfg,
                                             std::vector<std::string>* warnings) {
  double a_trunc = std::isnan(cfg.a_trunc)
                       ? default_a_trunc(payoff, model, z_star)
                       : cfg.a_trunc;
  if (corner_upper) {
    // beta is the constant y*: all lower-stop states match the cap corner
    std::vector<double> xs{a_trunc, z_star}, ys{y_star, y_star};
    return {TabulatedCurve(xs, ys), y_star};
  }
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double y_cap = std::isnan(cfg.y_hi) ? 1e6 * reference_scale(payoff, model)
                                      : cfg.y_hi;

  // descending i-grid from z* toward a
  std::vector<double> inodes;
  if (a_trunc > 0.0) {
    inodes = num::geomspace(a_trunc, z_star, cfg.beta_nodes);
  } else {
    inodes = num::linspace(a_trunc, z_star, cfg.beta_nodes);
  }
  std::reverse(inodes.begin(), inodes.end());

  std::vector<double> is{z_star}, bs{y_star};
  double y_prev = y_star;
  for (std::size_t k = 1; k < inodes.size(); ++k) {
    double i = inodes[k];
    auto res = [&](double y) { return h_function(payoff, model, i, y); };
    double lo = y_prev, f_lo = res(lo);
    if (f_lo > 0.0) {
      // root sits marginally below the previous one; widen downward a touch
      double lo2 = std::max(y_star, lo - 1e-6 * (1.0 + std::abs(lo)));
      if (res(lo2) > 0.0)
        throw NonMonotoneCurve("matching curve decreased beyond tolerance at i=" +
                               std::to_string(i));
      lo = lo2;
      f_lo = res(lo);
    }
    double step = std::max(1e-9, 2e-3 * (1.0 + std::abs(y_prev)));
    double hi = y_prev, f_hi = f_lo;
    while (f_hi <= 0.0) {
      hi += step;
      step *= 2.0;
      if (hi > y_cap)
        throw RootLost("matching-curve bracket escaped above " +
                       std::to_string(y_cap) + " at i=" + std::to_string(i));
      f_hi = res(hi);
    }
    double y_i = num::brent_root(res, lo, hi, {cfg.root_tol, 300});
    if (y_i < y_prev - 1e-7 * (1.0 + std::abs(y_prev)))
      throw NonMonotoneCurve("matching curve not increasing toward a");
    is.push_back(i);
    bs.push_back(y_i);
    y_prev = std::max(y_prev, y_i);
  }

  // a geometric i-grid leaves the steep end of the curve (toward zeta) thinly
  // sampled; bisect i wherever adjacent matched levels gap too widely
  double gap_target = (bs.back() - bs.front()) / (1.5 * cfg.beta_nodes);
  for (int sweep = 0; sweep < 3 && gap_target > 0.0; ++sweep) {
    std::vector<double> nis{is.front()}, nbs{bs.front()};
    bool inserted = false;
    for (std::size_t k = 1; k < is.size(); ++k) {
      if (bs[k] - bs[k - 1] > gap_target) {
        double mid = (is[k - 1] > 0.0 && is[k] > 0.0)
                         ? std::sqrt(is[k - 1] * is[k])
                         : 0.5 * (is[k - 1] + is[k]);
        try {
          double y_mid = num::brent_root(
              [&](double y) { return h_function(payoff, model, mid, y); },
              bs[k - 1], bs[k], {cfg.root_tol, 300});
          nis.push_back(mid);
          nbs.push_back(y_mid);
          inserted = true;
        } catch (const Error&) {
          // bracket degenerate at this gap; keep the coarse nodes
        }
      }
      nis.push_back(is[k]);
      nbs.push_back(bs[k]);
    }
    is.swap(nis);
    bs.swap(nbs);
    if (!inserted) break;
  }

  std::reverse(is.begin(), is.end());
  std::reverse(bs.begin(), bs.end());

  // zeta: Aitken extrapolation of the curve limit toward a
  double zeta = bs.front();
  std::size_t n = bs.size();
  if (n >= 3) {
    double b1 = bs[2], b2 = bs[1], b3 = bs[0];  // toward a
    double den = b1 - 2.0 * b2 + b3;
    if (std::abs(den) > 1e-14 * (1.0 + std::abs(b3))) {
      double acc = (b3 * b1 - b2 * b2) / den;
      if (acc >= b3 - 1e-9 && acc < y_cap) zeta = acc;
    }
  }
  // cross-check through the generalized inverse: f2(zeta) = f1(a_trunc)
  double f1_last = h1_closed(payoff, model, is.front(), bs.front());
  auto f2_tail = [&](double m) {
    return payoff.g(m) -
           payoff.g_prime_right(m) * c.psi(m) / c.dpsi(m) - f1_last;
  };
  try {
    double lo = y_star, hi = std::max(zeta * 1.5, y_star + 1.0);
    int guard = 0;
    while (f2_tail(hi) < 0.0 && ++guard < 60) hi *= 1.5;
    double cross = num::brent_root(f2_tail, lo, hi, {1e-12, 300});
    if (std::abs(cross - zeta) > 1e-4 * (1.0 + std::abs(zeta)) && warnings)
      warnings->push_back("zeta extrapolation and generalized-inverse root "
                          "disagree: " + std::to_string(zeta) + " vs " +
                          std::to_string(cross));
  } catch (const Error&) {
    if (warnings) warnings->push_back("zeta generalized-inverse cross-check failed");
  }
  return {TabulatedCurve(std::move(is), std::move(bs)), zeta};
}

double RepresentationTwoSided::beta_of(double i) const {
  if (!smooth_fit_upper) return y_star;
  if (i >= z_star) return y_star;
  if (i <= beta.x_min()) return beta.ys().front();
  return beta(i);
}

double RepresentationTwoSided::alpha_of(double m) const {
  if (m >= zeta) return model.spec.a;
  if (m <= y_star) return z_star;
  if (!smooth_fit_upper) return model.spec.a;
  // inverse through the traced curve, clamped to its range; beta values
  // descend in i, so the largest matched level sits at the a-end node
  double m_hi = beta.ys().front();
  if (m >= m_hi) return beta.x_min();
  return alpha(m);
}

double RepresentationTwoSided::f1_at(double i) const {
  return h1_closed(payoff, model, std::min(i, z_star), beta_of(i));
}

double RepresentationTwoSided::f2_at(double m) const {
  if (m >= zeta || !smooth_fit_upper)
    return payoff.g(m) - payoff.g_prime_right(m) * model.pair.psi(m) /
                             model.pair.psi_prime(m);
  return h2_closed(payoff, model, m, alpha_of(m));
}

RepresentationTwoSided solve_two_sided(const Payoff& payoff, const Model& model,
                                       TwoSidedConfig cfg) {
  RepresentationTwoSided rep;
  rep.payoff = payoff;
  rep.model = model;
  bool corner = false;
  std::tie(rep.z_star, rep.y_star) = solve_optimal_pair(payoff, model, cfg,
                                                        &corner);
  rep.smooth_fit_upper = !corner;
  rep.smooth_fit_lower = true;
  std::tie(rep.beta, rep.zeta) =
      trace_beta(payoff, model, rep.z_star, rep.y_star, corner, cfg,
                 &rep.warnings);

  // f1 on the traced grid (+ dual-formula audit), f2 by matching
  const auto& is = rep.beta.xs();
  const auto& bs = rep.beta.ys();
  std::vector<double> f1v(is.size());
  for (std::size_t k = 0; k < is.size(); ++k) {
    f1v[k] = h1_closed(payoff, model, is[k], bs[k]);
    if (cfg.check_dual_formulas && !corner) {
      double dual = f1_integral(payoff, model, is[k], bs[k]);
      double scale = std::max(std::abs(f1v[k]), std::abs(dual));
      // at the optimum both formulas vanish; a relative audit there only
      // compares quadrature noise
      if (scale > 1e-6 * (1.0 + std::abs(payoff.g(is[k]))) &&
          std::abs(f1v[k] - dual) > 1e-6 * scale)
        throw MismatchError("f1 closed ratio and integral ratio disagree at i=" +
                            std::to_string(is[k]));
    }
  }
  for (std::size_t k = 0; k + 1 < is.size(); ++k)
    if (f1v[k] < f1v[k + 1] - 1e-7 * (1.0 + std::abs(f1v[k])))
      throw MonotonicityFailure("f1 must be non-increasing");
  rep.f1 = TabulatedCurve(is, f1v);

  if (!corner) {
    // inverse of beta, dropping ties so the abscissa stays strictly monotone
    std::vector<double> ax, ay;
    for (std::size_t k = is.size(); k-- > 0;) {
      if (!ax.empty() && !(bs[k] > ax.back() + 1e-14 * (1.0 + std::abs(bs[k]))))
        continue;
      ax.push_back(bs[k]);
      ay.push_back(is[k]);
    }
    rep.alpha = TabulatedCurve(ax, ay);
    // f2 nodes: matched values on [y*, zeta), then the one-sided tail
    std::vector<double> ms, f2v;
    for (std::size_t k = is.size(); k-- > 0;) {
      if (!ms.empty() && !(bs[k] > ms.back() + 1e-14 * (1.0 + std::abs(bs[k]))))
        continue;
      ms.push_back(bs[k]);
      f2v.push_back(f1v[k]);
    }
    double tail_hi = std::max(3.0 * std::abs(rep.zeta), rep.zeta + 10.0);
    for (double m : num::geomspace(rep.zeta * (1.0 + 1e-9), tail_hi, 40)) {
      if (m <= ms.back() + 1e-12 * (1.0 + std::abs(m))) continue;
      ms.push_back(m);
      f2v.push_back(payoff.g(m) - payoff.g_prime_right(m) * model.pair.psi(m) /
                                      model.pair.psi_prime(m));
    }
    rep.f2 = TabulatedCurve(ms, f2v);
  } else {
    std::vector<double> ms, f2v;
    double tail_hi = std::max(3.0 * std::abs(rep.y_star), rep.y_star + 10.0);
    for (double m : num::geomspace(rep.y_star, tail_hi, 60)) {
      ms.push_back(m);
      f2v.push_back(payoff.g(m) - payoff.g_prime_right(m) * model.pair.psi(m) /
                                      model.pair.psi_prime(m));
    }
    rep.f2 = TabulatedCurve(ms, f2v);
    rep.alpha = TabulatedCurve(std::vector<double>{rep.y_star, tail_hi},
                               std::vector<double>{model.spec.a, model.spec.a});
  }
  {
    const auto& v = rep.f2.ys();
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
      if (v[k + 1] < v[k] - 1e-7 * (1.0 + std::abs(v[k])))
        throw MonotonicityFailure("f2 must be non-decreasing");
  }

  auto coeffs = value_coeffs(payoff, model);
  double A1 = coeffs.A1(rep.z_star, rep.y_star);
  double A2 = coeffs.A2(rep.z_star, rep.y_star);
  Payoff pc = payoff;
  Model mc = model;
  double zs = rep.z_star, ys = rep.y_star;
  rep.value = [pc, mc, A1, A2, zs, ys](double x) {
    if (x <= zs || x >= ys) return pc.g(x);
    return A1 * mc.pair.phi(x) + A2 * mc.pair.psi(x);
  };
  return rep;
}

double j_value_two_sided(const RepresentationTwoSided& rep, double x) {
  const Model& m = rep.model;
  Ctx c{rep.payoff, m, m.pair.wronskian_B, m.r()};
  double z = rep.z_star, y = rep.y_star, zeta = rep.zeta;
  double a = m.spec.a, b = m.spec.b;

  auto dens1 = [&](double i) {  // P_x(I in di, M < beta(i)) / di
    double be = rep.beta_of(i);
    double ph = c.phi_hat(be, i);
    return (-c.B * c.Sp(i) - c.phi_hat_dx(be, i)) * c.phi_hat(be, x) / (ph * ph);
  };
  auto dens2 = [&](double mm) {  // P_x(I > alpha(m), M in dm) / dm
    double al = rep.alpha_of(mm);
    double ps = c.psi_hat(al, mm);
    return (-c.B * c.Sp(mm) + c.psi_hat_dx(al, mm)) * c.psi_hat(al, x) /
           (ps * ps);
  };
  auto lower_part = [&](double up) {
    if (!(up > a)) return 0.0;
    return num::integrate([&](double i) { return rep.f1_at(i) * dens1(i); }, a,
                          up, rep.payoff.kinks);
  };
  auto middle_part = [&](double lo) {  // int_lo^zeta f2 dens2 + analytic tail
    double v = 0.0;
    if (lo < zeta)
      v = num::integrate([&](double mm) { return rep.f2_at(mm) * dens2(mm); },
                         lo, zeta, rep.payoff.kinks);
    return v + c.psi(x) * rep.payoff.g(zeta) / c.psi(zeta);
  };

  if (x <= z) return lower_part(x) + middle_part(rep.beta_of(x));
  if (x < y) return lower_part(z) + middle_part(y);
  if (x >= zeta) {
    // pure one-sided tail; truncate an infinite boundary at a modest point
    // and close with the exact remainder g(X)/psi(X) (the integrand equals
    // -d(g/psi) beyond zeta, so the tail telescopes)
    double hi = b;
    double rem = 0.0;
    if (!std::isfinite(b)) {
      hi = std::max(2.0 * x, 8.0 * std::max(zeta, 1.0));
      for (double k : rep.payoff.kinks)
        if (std::isfinite(k)) hi = std::max(hi, 2.0 * k);
      while (!std::isfinite(c.psi(hi)) && hi > 2.0 * x) hi *= 0.5;
      rem = c.psi(x) * rep.payoff.g(hi) / c.psi(hi);
    }
    return rem + c.psi(x) * num::integrate(
                                [&](double mm) {
                                  double ps = c.psi(mm);
                                  return rep.f2_at(mm) * c.dpsi(mm) / (ps * ps);
                                },
                                x, hi, rep.payoff.kinks);
  }
  return lower_part(rep.alpha_of(x)) + middle_part(x);
}

double stopping_signal(const Payoff& payoff, const Model& model, double x,
                       const TwoSidedConfig& cfg, SignalDiagnostics* diag) {
  Ctx c{payoff, model, model.pair.wronskian_B, model.r()};
  double z_lo = std::isnan(cfg.z_lo) ? default_z_lo(payoff, model) : cfg.z_lo;
  double y_hi = std::isnan(cfg.y_hi) ? default_y_hi(payoff, model) : cfg.y_hi;

  double b1 = payoff.g(x) -
              payoff.g_prime_right(x) * c.psi(x) / c.dpsi(x);
  double b4 = payoff.g(x) -
              payoff.g_prime_right(x) * c.phi(x) / c.dphi(x);

  // multistart inner infima on coarse grids with golden refinement
  auto inner_inf = [&](auto&& fn, double lo, double hi, bool* warn) {
    auto grid = lo > 0.0 ? num::geomspace(lo, hi, 60) : num::linspace(lo, hi, 60);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = fn(grid[i]);
    // refine around the two best separated local minima
    std::vector<std::size_t> order(grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t u, std::size_t v) { return vals[u] < vals[v]; });
    double best = num::kInf, second = num::kInf;
    std::size_t taken = 0;
    std::size_t first_idx = grid.size();
    for (std::size_t idx : order) {
      if (taken >= 2) break;
      if (taken == 1 && (idx + 3 >= first_idx && first_idx + 3 >= idx))
        continue;  // same basin
      std::size_t lo_i = idx > 0 ? idx - 1 : 0;
      std::size_t hi_i = std::min(idx + 1, grid.size() - 1);
      double xm = num::golden_min(fn, grid[lo_i], grid[hi_i], 1e-12);
      double v = fn(xm);
      if (taken == 0) {
        best = v;
        first_idx = idx;
      } else {
        second = v;
      }
      ++taken;
    }
    if (warn && std::isfinite(second) &&
        std::abs(second - best) < 1e-9 * (1.0 + std::abs(best)))
      *warn = false;  // agreeing minima: no warning
    else if (warn && std::isfinite(second) && second < best)
      *warn = true;
    return std::min(best, second);
  };

  bool warn2 = false, warn3 = false;
  double eps = 1e-7 * (1.0 + std::abs(x));
  double b3 = inner_inf([&](double yy) { return h1_closed(payoff, model, x, yy); },
                        x + eps, y_hi, &warn3);
  double b2 = inner_inf([&](double zz) { return h2_closed(payoff, model, x, zz); },
                        z_lo, x - eps, &warn2);
  if (diag) {
    diag->branch_values[0] = b1;
    diag->branch_values[1] = b2;
    diag->branch_values[2] = b3;
    diag->branch_values[3] = b4;
    diag->multistart_warning = warn2 || warn3;
  }
  return std::min(std::min(b1, b4), std::min(b2, b3));
}

OneSidedLimitReport one_sided_limit_check(const Payoff& payoff,
                                          const Model& model,
                                          const RepresentationTwoSided& rep) {
  OneSidedLimitReport report;
  double lo = rep.zeta, hi = std::max(3.0 * rep.zeta, rep.zeta + 10.0);
  for (double m : num::geomspace(lo * (1.0 + 1e-12), hi, 60)) {
    double tail = rep.f2_at(m);
    double one_sided = f_hat(payoff, model, m, Side::Right);
    double dev = std::abs(tail - one_sided) / (1.0 + std::abs(one_sided));
    report.samples.push_back({m, dev});
    report.max_rel_dev = std::max(report.max_rel_dev, dev);
  }
  return report;
}

}  // namespace exsup
