#include "exsup/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace exsup {
namespace {

std::function<double(double)> zero_fn() {
  return [](double) { return 0.0; };
}

// piecewise-linear payoff from sorted breakpoints and slopes; slopes has one
// more entry than breaks.
Payoff piecewise_linear(PayoffKind kind, double value_at_first_break,
                        std::vector<double> breaks,
                        std::vector<double> slopes) {
  Payoff p;
  p.kind = kind;
  p.kinks = breaks;
  auto segment = [breaks, slopes](double x) {
    std::size_t i = 0;
    while (i < breaks.size() && x >= breaks[i]) ++i;
    return i;  // index into slopes; x < breaks[i] or past the end
  };
  auto value = [breaks, slopes, value_at_first_break](double x) {
    double x0 = breaks.front();
    if (x <= x0) return value_at_first_break + slopes[0] * (x - x0);
    double acc = value_at_first_break, prev = x0;
    std::size_t j = 1;
    for (; j < breaks.size() && breaks[j] <= x; ++j) {
      acc += slopes[j] * (breaks[j] - prev);
      prev = breaks[j];
    }
    return acc + slopes[j] * (x - prev);
  };
  p.g = value;
  p.g_prime_left = [breaks, slopes](double x) {
    std::size_t i = 0;
    while (i < breaks.size() && x > breaks[i]) ++i;
    return slopes[i];
  };
  p.g_prime_right = [breaks, slopes, segment](double x) {
    return slopes[segment(x)];
  };
  p.g_second = zero_fn();
  return p;
}

}  // namespace

Payoff make_call(double strike) {
  Payoff p;
  p.kind = PayoffKind::Call;
  p.g = [strike](double x) { return x - strike; };
  p.g_prime_left = [](double) { return 1.0; };
  p.g_prime_right = p.g_prime_left;
  p.g_second = zero_fn();
  return p;
}

Payoff make_capped_call(double strike, double cap) {
  if (!(cap > 0.0)) throw ParamError("cap must be positive");
  return piecewise_linear(PayoffKind::CappedCall, 0.0, {strike, strike + cap},
                          {0.0, 1.0, 0.0});
}

Payoff make_straddle(double strike) {
  return piecewise_linear(PayoffKind::Straddle, 0.0, {strike}, {-1.0, 1.0});
}

Payoff make_capped_straddle(double strike, double cap) {
  return make_asym_capped_straddle(strike, cap, cap);
}

Payoff make_asym_capped_straddle(double strike, double cap_lower,
                                 double cap_upper) {
  if (!(cap_lower > 0.0 && cap_upper > 0.0))
    throw ParamError("caps must be positive");
  return piecewise_linear(
      PayoffKind::CappedStraddle, cap_lower,
      {strike - cap_lower, strike, strike + cap_upper}, {0.0, -1.0, 1.0, 0.0});
}

Payoff make_max_with_floor(double floor_level) {
  Payoff p = piecewise_linear(PayoffKind::MaxWithFloor, floor_level,
                              {floor_level}, {0.0, 1.0});
  return p;
}

Payoff make_constant(double level) {
  Payoff p;
  p.kind = PayoffKind::Custom;
  p.g = [level](double) { return level; };
  p.g_prime_left = zero_fn();
  p.g_prime_right = zero_fn();
  p.g_second = zero_fn();
  return p;
}

}  // namespace exsup
