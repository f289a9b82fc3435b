#pragma once

namespace csslab::theory {

/// Upper-tail standard normal probability.
double q_func(double x);

/// x with erfc(x) == y, for 0 < y < 2.
double inv_erfc(double y);

/// Standard normal upper quantile: q_func(q_inverse(p)) == p, 0 < p < 1.
double q_inverse(double p);

/// Regularized upper incomplete gamma Gamma(s, x) / Gamma(s).
double upper_reg_gamma(double s, double x);

/// Generalized Marcum Q function Q_order(a, b), evaluated through the
/// noncentral chi-square survival function with 2*order degrees of freedom
/// and noncentrality a^2 at point b^2.
double marcum_q(double order, double a, double b);

}  // namespace csslab::theory
