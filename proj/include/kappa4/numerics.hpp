#pragma once

// Numerical building blocks shared by the distribution, estimation and
// inference code: beta normalisers, a fixed-node quadrature rule on (0, 1),
// and the chi-square quantile used for likelihood-ratio cutoffs.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include "kappa4/error.hpp"

namespace kappa4::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double log_beta(double p, double q) {
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

// Double-exponential (tanh-sinh) rule on the open unit interval.
//
// The integrand receives both the abscissa u and its complement 1 - u, each
// computed without cancellation, so quantile-type integrands with endpoint
// singularities can be evaluated accurately right up to the ends. The node
// set is fixed by `step`, which makes the result a smooth function of any
// parameters the integrand depends on. Halving `step` doubles the node count.
// The integrand may return any type R with R + R and double * R defined, so
// several integrals over the same nodes can be accumulated in one pass.
template <class Fn>
auto integrate_unit_interval(Fn&& f, double step = 1.0 / 64.0) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  constexpr double kTiny = 1e-300;
  // Centre node, then symmetric pairs until both tails underflow.
  auto sum = (std::numbers::pi * 0.25) * f(0.5, 0.5);
  for (std::size_t j = 1;; ++j) {
    const double t = static_cast<double>(j) * step;
    const double u = kHalfPi * std::sinh(t);
    const double e = std::exp(-2.0 * u);  // in (0, 1)
    const double small = e / (1.0 + e);   // 1 - x for the right node, x for the left node
    const double large = 1.0 / (1.0 + e);
    if (small < kTiny) break;
    const double w = std::numbers::pi * std::cosh(t) * small * large;
    sum = sum + w * f(large, small);  // right node: x = large, 1 - x = small
    sum = sum + w * f(small, large);  // left node:  x = small, 1 - x = large
  }
  return step * sum;
}

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw InputError("gamma_p: requires a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(log_prefix);
  }
  // Continued fraction for Q(a, x), modified Lentz.
  constexpr double kFpMin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double hcf = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double delta = d * c;
    hcf *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_prefix) * hcf;
}

inline double chi_square_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

// Inverse of chi_square_cdf by bisection; the cdf is monotone so this cannot fail.
inline double chi_square_quantile(double level, double dof = 1.0) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("chi_square_quantile: level must be in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  while (chi_square_cdf(hi, dof) < level) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi_square_cdf(mid, dof) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace kappa4::numerics
