#include "exsup/kummer.hpp"

#include <cmath>
#include <string>

#include "exsup/errors.hpp"

namespace exsup {
namespace {

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && std::abs(x - std::round(x)) < 1e-12;
}

double series(double a, double b, double z, const KummerOptions& opt) {
  // Kahan-compensated ascending series sum_k (a)_k / (b)_k z^k / k!
  double sum = 1.0, comp = 0.0, term = 1.0;
  for (int k = 0; k < opt.max_terms; ++k) {
    double ak = a + k, bk = b + k;
    if (ak == 0.0) return sum;  // polynomial case terminates
    if (bk == 0.0)
      throw ParamError("kummer_m: denominator parameter hits a pole");
    term *= ak * z / (bk * (k + 1.0));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (std::abs(term) <= opt.precision * std::abs(sum) && k > 2) return sum;
  }
  throw SeriesDivergence("kummer_m: series exceeded " +
                         std::to_string(opt.max_terms) + " terms");
}

}  // namespace

double kummer_m(double a, double b, double z, KummerOptions opt) {
  if (is_nonpositive_integer(b) && !(is_nonpositive_integer(a) && a > b))
    throw ParamError("kummer_m: b must not be a non-positive integer");
  if (z < 0.0 && !is_nonpositive_integer(a))
    return std::exp(z) * series(b - a, b, -z, opt);  // Kummer transform
  return series(a, b, z, opt);
}

double kummer_m_derivative(double a, double b, double z, KummerOptions opt) {
  return a / b * kummer_m(a + 1.0, b + 1.0, z, opt);
}

}  // namespace exsup
