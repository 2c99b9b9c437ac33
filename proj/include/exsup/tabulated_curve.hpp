#pragma once

// Shape-preserving (Fritsch-Carlson) monotone cubic interpolation of a
// tabulated curve.  Used for traced boundary curves and their inverses,
// where overshoot across nodes would break monotonicity invariants.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "exsup/errors.hpp"

namespace exsup {

class TabulatedCurve {
 public:
  TabulatedCurve() = default;
  TabulatedCurve(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)) {
    if (x_.size() != y_.size() || x_.size() < 2)
      throw DomainError("TabulatedCurve needs >= 2 matching nodes");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      if (!(x_[i] < x_[i + 1]))
        throw DomainError("TabulatedCurve nodes must be strictly increasing");
    build_slopes();
  }

  double operator()(double q) const {
    if (!(q >= x_.front() && q <= x_.back()))
      throw DomainError("TabulatedCurve evaluated outside its domain");
    auto it = std::upper_bound(x_.begin(), x_.end(), q);
    std::size_t i = (it == x_.begin()) ? 0 : (it - x_.begin() - 1);
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    double h = x_[i + 1] - x_[i], t = (q - x_[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }
  bool empty() const { return x_.empty(); }

  // Swap roles of abscissa and ordinate; requires strictly monotone values.
  TabulatedCurve inverse() const {
    std::vector<double> xs = y_, ys = x_;
    if (xs.front() > xs.back()) {
      std::reverse(xs.begin(), xs.end());
      std::reverse(ys.begin(), ys.end());
    }
    return TabulatedCurve(std::move(xs), std::move(ys));
  }

 private:
  void build_slopes() {
    std::size_t n = x_.size();
    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = delta[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d_[i] = 0.0;
      } else {
        double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    d_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  static double edge_slope(double h0, double h1, double del0, double del1) {
    double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0) return 0.0;
    if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0))
      return 3.0 * del0;
    return d;
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace exsup
