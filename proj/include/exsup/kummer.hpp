#pragma once

// Confluent hypergeometric function M(a, b, z) (Kummer's function of the
// first kind) by ascending series with compensated summation.  Negative
// arguments are routed through the Kummer transform
// M(a,b,z) = e^z M(b-a, b, -z), which keeps all series terms positive for
// the parameter ranges used by the logistic fundamental solutions.

namespace exsup {

struct KummerOptions {
  double precision = 1e-14;   // relative term size at which to stop
  int max_terms = 10000;      // SeriesDivergence beyond this
};

double kummer_m(double a, double b, double z, KummerOptions opt = {});

// dM/dz = (a/b) M(a+1, b+1, z)
double kummer_m_derivative(double a, double b, double z, KummerOptions opt = {});

}  // namespace exsup
