#pragma once

// Reward functions g with explicit kink bookkeeping: one-sided derivatives
// at every kink, and a second derivative defined away from the kink set.

#include <functional>
#include <vector>

#include "exsup/errors.hpp"

namespace exsup {

enum class Side { Left, Right };

enum class PayoffKind {
  Call,
  CappedCall,
  Straddle,
  CappedStraddle,
  MaxWithFloor,
  Resolvent,
  Custom
};

struct Payoff {
  PayoffKind kind = PayoffKind::Custom;
  std::function<double(double)> g;
  std::vector<double> kinks;  // sorted
  std::function<double(double)> g_prime_left;
  std::function<double(double)> g_prime_right;
  std::function<double(double)> g_second;  // defined off the kink set

  double gp(double x, Side s) const {
    return s == Side::Left ? g_prime_left(x) : g_prime_right(x);
  }
  // jump of g' at a kink
  double gp_jump(double k) const { return g_prime_right(k) - g_prime_left(k); }
  bool has_kink_in(double lo, double hi) const {
    for (double k : kinks)
      if (k > lo && k < hi) return true;
    return false;
  }
};

Payoff make_call(double strike);                         // x - K (linear)
Payoff make_capped_call(double strike, double cap);      // min((x-K)^+, C)
Payoff make_straddle(double strike);                     // |x - K|
Payoff make_capped_straddle(double strike, double cap);  // min(|x-K|, C)
// min(K - x, C1)^+ + min(x - K, C2)^+
Payoff make_asym_capped_straddle(double strike, double cap_lower,
                                 double cap_upper);
Payoff make_max_with_floor(double floor_level);          // x v c
Payoff make_constant(double level);

}  // namespace exsup
