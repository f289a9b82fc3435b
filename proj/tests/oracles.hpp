#pragma once

// Reference implementations that share no code with src/special.cpp.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

// Boost gives up on very large degrees of freedom; callers skip those triples.
inline std::optional<double> marcum_q_boost(double m, double a, double b) {
  try {
    boost::math::non_central_chi_squared d(2.0 * m, a * a);
    return boost::math::cdf(boost::math::complement(d, b * b));
  } catch (...) {
    return std::nullopt;
  }
}

// Q_M(a, b) = exp(-(a^2 + b^2) / 2) * sum_{k = 1 - M}^inf (a / b)^k I_k(ab), integer M.
// Only well behaved for moderate ab, which is where it is used.
inline double marcum_q_bessel(int m, double a, double b) {
  if (b == 0.0) return 1.0;
  const double ab = a * b;
  const double r = a / b;
  double sum = 0.0;
  for (int k = 1 - m; k < 1 - m + 4000; ++k) {
    const double term = std::pow(r, k) * std::cyl_bessel_i(std::abs(k), ab) * std::exp(-ab);
    sum += term;
    if (k > 0 && term < 1e-18 * sum) break;
  }
  return std::exp(-(a - b) * (a - b) / 2.0) * sum;
}

// Survival of the noncentral chi-square by integrating its density.
inline double marcum_q_quadrature(double m, double a, double b) {
  boost::math::non_central_chi_squared d(2.0 * m, a * a);
  const double mean = 2.0 * m + a * a;
  const double sd = std::sqrt(2.0 * (2.0 * m + 2.0 * a * a));
  const double lo = b * b;
  const double hi = std::max(lo, mean) + 60.0 * sd;
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double x) { return boost::math::pdf(d, x); }, lo, hi, 1e-13);
}

inline std::optional<double> gamma_q_boost(double s, double x) {
  try {
    return boost::math::gamma_q(s, x);
  } catch (...) {
    return std::nullopt;
  }
}

// Gamma(s, x) / Gamma(s) by integrating t^(s-1) e^-t / Gamma(s) in log space.
inline double gamma_q_quadrature(double s, double x) {
  const double lg = std::lgamma(s);
  auto f = [&](double t) { return t <= 0.0 ? 0.0 : std::exp((s - 1.0) * std::log(t) - t - lg); };
  const double hi = std::max(x, s) + 60.0 * std::sqrt(s) + 60.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, x, hi, 1e-13);
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i)
    v.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
  return v;
}

}  // namespace oracle
