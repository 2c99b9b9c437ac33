#pragma once

// Shared numerical utilities: adaptive quadrature (with kink splitting and
// infinite endpoints), Brent root bracketing/refinement, golden-section
// minimization, compensated/pairwise summation, and a memoized running
// integral used for scale densities and resolvent payoffs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "exsup/errors.hpp"

namespace exsup::num {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct QuadOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-10;
  int max_depth = 15;
};

// Integral of f over (lo, hi); endpoints may be +-infinity.  The domain is
// split at the supplied interior breakpoints (payoff kinks) so the adaptive
// rule never straddles a derivative discontinuity.  Throws QuadratureFailure
// when the error estimate refuses to shrink (e.g. a divergent integrand).
template <class F>
double integrate(F&& f, double lo, double hi,
                 std::span<const double> breaks = {}, QuadOptions opt = {}) {
  if (!(lo < hi)) {
    if (lo == hi) return 0.0;
    return -integrate(f, hi, lo, breaks, opt);
  }
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  std::vector<double> pts{lo};
  for (double k : breaks)
    if (std::isfinite(k) && k > lo && k < hi) pts.push_back(k);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  // tolerances below ~sqrt(eps) make the Gauss-Kronrod error *estimate*
  // diverge under repeated subdivision even when the value is exact
  double tol = std::max(opt.rel_tol, 1e-8);
  double fmax = 0.0;
  auto sampled = [&](double t) {
    double v = f(t);
    double a = std::abs(v);
    if (a > fmax) fmax = a;
    return v;
  };
  double total = 0.0, err_total = 0.0, l1_total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] == pts[i + 1]) continue;
    double err = 0.0, l1 = 0.0;
    total += GK::integrate(sampled, pts[i], pts[i + 1], opt.max_depth, tol,
                           &err, &l1);
    err_total += err;
    l1_total += l1;
  }
  double scale = std::max(std::abs(total), l1_total);
  // the estimate itself saturates near eps^(2/3) * max|f|; integrands with a
  // wide dynamic range can never report less, however exact the value is
  double est_floor = 4e-11 * fmax;
  if (!std::isfinite(total) ||
      err_total > 100.0 * std::max({opt.abs_tol, tol * scale, est_floor}))
    throw QuadratureFailure("quadrature did not converge (error estimate " +
                            std::to_string(err_total) + " on [" +
                            std::to_string(lo) + ", " + std::to_string(hi) +
                            "], scale " + std::to_string(scale) + ")");
  return total;
}

struct RootOptions {
  double x_tol = 1e-13;
  int max_iter = 200;
};

// Classic Brent root refinement on a bracketing interval [a, b].
template <class F>
double brent_root(F&& f, double a, double b, RootOptions opt = {}) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw NoRoot("brent_root: interval does not bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < opt.max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                 0.5 * opt.x_tol;
    double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = m; e = m;  // bisection
    } else {
      double s = fb / fa, p, q;
      if (a == c) {  // secant
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {  // inverse quadratic
        double qq = fa / fc, rr = fb / fc;
        p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = m; e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; e = d = b - a; }
  }
  throw NoRoot("brent_root: iteration limit reached");
}

// Golden-section minimization on [a, b] for a unimodal objective.
template <class F>
double golden_min(F&& f, double a, double b, double tol = 1e-10) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a); f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Deterministic pairwise (tree) reduction: the result is independent of how
// the caller chunks the input, which keeps Monte Carlo output reproducible
// across thread counts.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / double(n - 1);
  v.front() = a;
  v.back() = b;
  return v;
}

inline std::vector<double> geomspace(double a, double b, int n) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("geomspace needs positive ends");
  std::vector<double> v(n);
  double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) v[i] = std::exp(la + (lb - la) * i / double(n - 1));
  // exact endpoints: the exp/log round trip can land a hair past a kink
  v.front() = a;
  v.back() = b;
  return v;
}

// Memoized antiderivative F(x) = int_anchor^x f(t) dt.  Queries integrate
// only the increment from the nearest cached node, so repeated evaluations
// (scale densities inside nested quadratures, resolvent payoffs along Monte
// Carlo paths) refine a shared cache instead of restarting from the anchor.
class MemoizedIntegral {
 public:
  MemoizedIntegral() = default;
  MemoizedIntegral(std::function<double(double)> f, double anchor,
                   QuadOptions opt = {})
      : f_(std::move(f)), opt_(opt) {
    cache_[anchor] = 0.0;
  }

  double operator()(double x) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.lower_bound(x);
    // nearest cached node
    if (it == cache_.end()) --it;
    else if (it != cache_.begin()) {
      auto prev = std::prev(it);
      if (x - prev->first < it->first - x) it = prev;
    }
    if (it->first == x) return it->second;
    // the Gauss-Kronrod error estimate saturates near eps^(2/3) * max|f|
    // (a relative floor of ~4e-11/width); asking for more on a narrow
    // increment only triggers fruitless full-depth recursion per query
    QuadOptions opt = opt_;
    double w = std::abs(x - it->first);
    opt.rel_tol = std::max(opt.rel_tol, 1.6e-10 / std::max(w, 1e-300));
    double fmax = std::max(std::abs(f_(it->first)), std::abs(f_(x)));
    if (std::isfinite(fmax))
      opt.abs_tol = std::max(opt.abs_tol, 1e-9 * fmax);
    double val = it->second + integrate(f_, it->first, x, {}, opt);
    cache_[x] = val;
    return val;
  }

 private:
  std::function<double(double)> f_;
  QuadOptions opt_;
  mutable std::map<double, double> cache_;
  mutable std::mutex mu_;
};

}  // namespace exsup::num
