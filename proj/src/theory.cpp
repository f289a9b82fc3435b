#include "csslab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "csslab/errors.hpp"

namespace csslab::theory {

namespace {

constexpr double kQuadTolerance = 1e-6;

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

void check_lambda(double lambda, const char* op) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError(std::string(op) + ": lambda must be a nonnegative finite value");
}

void check_gamma(double gamma, const char* op) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw DomainError(std::string(op) + ": gamma must be a nonnegative finite value");
}

// 1 - (1 - q)^k without losing small q.
double any_of(double q, int k) {
  if (q >= 1.0) return 1.0;
  return std::clamp(-std::expm1(k * std::log1p(-q)), 0.0, 1.0);
}

int resolve_window(const TheoryParams& p, int fallback) {
  return p.window_h1_events < 0 ? fallback : p.window_h1_events;
}

// Integrates f over [0, upper] in pieces so the adaptive rule sees the density
// bulk and the detection transition separately.
template <class F>
double integrate(F&& f, std::vector<double> cuts, double upper, const char* op,
                 double abs_tol = kQuadTolerance) {
  cuts.push_back(0.0);
  cuts.push_back(upper);
  std::erase_if(cuts, [&](double c) { return !(c >= 0.0 && c <= upper); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Boost compares the unscaled local error against the tolerance, so a deep
  // recursion limit only buys exponential work on rounding noise.
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double seg_err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, cuts[i], cuts[i + 1], 12, 1e-8, &seg_err);
    error += seg_err;
  }
  // Large integrands (moments) are judged relative to their size.
  if (!std::isfinite(total) || !(error <= std::max(abs_tol, 1e-7 * std::abs(total)))) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: quadrature did not converge (estimate %.6g, error %.3g on [0, %.6g])",
                  op, total, error, upper);
    throw NumericError(buf);
  }
  return total;
}

// Gaussian law of one combined (or, for SLS, one branch) energy.
struct Normal {
  double mean;
  double sd;
};

Normal event_normal(const TheoryParams& p, double gamma) {
  const double n = p.n_samples;
  const double s2 = p.noise_variance;
  switch (p.kind) {
    case CombinerKind::slc: {
      const double k = p.num_crs;
      return {n * s2 * (k + gamma), s2 * (1.0 + gamma / k) * std::sqrt(2.0 * n * k)};
    }
    case CombinerKind::mrc:
    case CombinerKind::sls:
      return {n * s2 * (1.0 + gamma), s2 * (1.0 + gamma) * std::sqrt(2.0 * n)};
  }
  throw InvalidArgument("event_normal: unknown combiner");
}

double approx_tail(const TheoryParams& p, double lambda, double gamma) {
  const auto law = event_normal(p, gamma);
  const double q = q_func((lambda - law.mean) / law.sd);
  return p.kind == CombinerKind::sls ? any_of(q, p.num_crs) : q;
}

double exact_tail(const TheoryParams& p, double lambda, double gamma) {
  const double u = p.tbw_product();
  const double a = std::sqrt(p.n_samples * gamma);
  const double b = std::sqrt(lambda / p.noise_variance);
  switch (p.kind) {
    case CombinerKind::slc:
      return marcum_q(p.num_crs * u, a, b);
    case CombinerKind::mrc:
      return marcum_q(u, a, b);
    case CombinerKind::sls:
      return any_of(marcum_q(u, a, b), p.num_crs);
  }
  throw InvalidArgument("exact_tail: unknown combiner");
}

// Single-branch detection law, used for the independent-branch SLS average.
double branch_tail(const TheoryParams& p, double lambda, double gamma, Form form) {
  if (form == Form::exact)
    return marcum_q(p.tbw_product(), std::sqrt(p.n_samples * gamma),
                    std::sqrt(lambda / p.noise_variance));
  const double n = p.n_samples;
  const double s2 = p.noise_variance;
  return q_func((lambda - n * s2 * (1.0 + gamma)) / (s2 * (1.0 + gamma) * std::sqrt(2.0 * n)));
}

// Per-event tail used inside the dual-threshold formulas.
double event_tail(const TheoryParams& p, double lambda, double gamma) {
  return p.window_model == WindowModel::exact ? exact_tail(p, lambda, gamma)
                                              : approx_tail(p, lambda, gamma);
}

// Mean and variance of sigma^2 * max_j Y_j with Y_j i.i.d. noncentral
// chi-square, N degrees of freedom, noncentrality N*gamma.
WindowStats sls_max_moments(const TheoryParams& p, double gamma) {
  const double n = p.n_samples;
  const double u = p.tbw_product();
  const double a = std::sqrt(n * gamma);
  const int k = p.num_crs;
  const double mean1 = n * (1.0 + gamma);
  const double sd1 = std::sqrt(2.0 * n * (1.0 + 2.0 * gamma));
  const double lo = std::max(0.0, mean1 - 12.0 * sd1);
  const double hi = mean1 + (25.0 + std::sqrt(2.0 * std::log(k + 1.0))) * sd1;

  auto survival = [&](double y) {
    const double q = a == 0.0 ? upper_reg_gamma(u, y / 2.0) : marcum_q(u, a, std::sqrt(y));
    return any_of(q, k);
  };
  const std::vector<double> cuts = {mean1 - sd1, mean1, mean1 + sd1, mean1 + 3.0 * sd1};
  // Shifted by lo so the variance is not a difference of two large moments.
  auto shift = [&](double t) { return survival(lo + t); };
  auto shift2 = [&](double t) { return 2.0 * t * survival(lo + t); };
  std::vector<double> rel;
  for (double c : cuts) rel.push_back(c - lo);
  // Tolerances scale with the moments themselves (sd1 and sd1^2 units). The
  // second moment is ~150 sd1^2 after the shift, so 1e-5 sd1^2 is already
  // far below what the Gaussian predictor can resolve.
  const double m1 = integrate(shift, rel, hi - lo, "sls_max_moments", 1e-7 * sd1);
  const double m2 = integrate(shift2, rel, hi - lo, "sls_max_moments", 1e-5 * sd1 * sd1);

  const double s2 = p.noise_variance;
  return {s2 * (lo + m1), s2 * s2 * std::max(0.0, m2 - m1 * m1)};
}

WindowStats event_moments(const TheoryParams& p, double gamma) {
  const double n = p.n_samples;
  const double k = p.num_crs;
  const double s2 = p.noise_variance;
  if (p.window_model == WindowModel::gaussian) {
    const auto law = event_normal(p, gamma);
    return {law.mean, law.sd * law.sd};
  }
  switch (p.kind) {
    case CombinerKind::slc:
      return {n * s2 * (k + gamma), s2 * s2 * (2.0 * n * k + 4.0 * n * gamma)};
    case CombinerKind::mrc:
      return {n * s2 * (1.0 + gamma), s2 * s2 * (2.0 * n + 4.0 * n * gamma)};
    case CombinerKind::sls:
      return sls_max_moments(p, gamma);
  }
  throw InvalidArgument("event_moments: unknown combiner");
}

std::vector<double> transition_cuts(const TheoryParams& p, double lambda) {
  const double base = p.kind == CombinerKind::slc ? p.num_crs : 1.0;
  std::vector<double> cuts;
  for (double l : {lambda / p.rho, lambda, lambda * p.rho}) {
    const double g = l / (p.n_samples * p.noise_variance) - base;
    if (g > 0.0) cuts.push_back(g);
  }
  return cuts;
}

std::vector<double> density_cuts(const TheoryParams& p, double shape) {
  const double s = shape;
  return {p.avg_snr * s, p.avg_snr * (s + 6.0 * std::sqrt(s)), p.avg_snr * (s + 15.0 * std::sqrt(s))};
}

double fading_shape(const TheoryParams& p) {
  return p.kind == CombinerKind::sls ? 1.0 : static_cast<double>(p.num_crs);
}

template <class F>
double fading_average(const TheoryParams& p, double lambda, F&& conditional, const char* op) {
  auto cuts = density_cuts(p, fading_shape(p));
  for (double c : transition_cuts(p, lambda)) cuts.push_back(c);
  auto integrand = [&](double g) {
    const double f = fading_pdf(p, g);
    return f == 0.0 ? 0.0 : conditional(g) * f;
  };
  return std::clamp(integrate(integrand, cuts, fading_upper_limit(p), op), 0.0, 1.0);
}

}  // namespace

void TheoryParams::validate() const {
  if (num_crs < 1) throw InvalidArgument("theory: K must be >= 1");
  if (n_samples < 2 || n_samples % 2 != 0)
    throw InvalidArgument("theory: N must be an even integer >= 2 (N = 2u)");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw InvalidArgument("theory: noise variance must be positive");
  if (!(avg_snr > 0.0) || !std::isfinite(avg_snr))
    throw InvalidArgument("theory: average SNR must be positive");
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw InvalidArgument("theory: rho must be >= 1");
  if (history_len < 2) throw InvalidArgument("theory: L must be >= 2");
  if (window_h1_events > history_len)
    throw InvalidArgument("theory: M must lie in [0, L]");
}

TheoryParams TheoryParams::with_window(int h1_events) const {
  TheoryParams out = *this;
  out.window_h1_events = h1_events;
  return out;
}

TheoryParams TheoryParams::with_rho(double value) const {
  TheoryParams out = *this;
  out.rho = value;
  return out;
}

double awgn_gamma(const TheoryParams& p) {
  p.validate();
  return p.kind == CombinerKind::sls ? p.avg_snr : p.num_crs * p.avg_snr;
}

double qfa_exact(const TheoryParams& p, double lambda) {
  p.validate();
  check_lambda(lambda, "qfa_exact");
  const double x = lambda / (2.0 * p.noise_variance);
  const double u = p.tbw_product();
  switch (p.kind) {
    case CombinerKind::slc:
      return upper_reg_gamma(p.num_crs * u, x);
    case CombinerKind::mrc:
      return upper_reg_gamma(u, x);
    case CombinerKind::sls:
      return any_of(upper_reg_gamma(u, x), p.num_crs);
  }
  throw InvalidArgument("qfa_exact: unknown combiner");
}

double qd_awgn_exact(const TheoryParams& p, double lambda, double gamma) {
  p.validate();
  check_lambda(lambda, "qd_awgn_exact");
  check_gamma(gamma, "qd_awgn_exact");
  return exact_tail(p, lambda, gamma);
}

double qfa_approx(const TheoryParams& p, double lambda) { return qd_awgn_approx(p, lambda, 0.0); }

double qd_awgn_approx(const TheoryParams& p, double lambda, double gamma) {
  p.validate();
  check_lambda(lambda, "qd_awgn_approx");
  check_gamma(gamma, "qd_awgn_approx");
  if (p.n_samples < 100) warn("Gaussian approximation used with N < 100");
  return approx_tail(p, lambda, gamma);
}

double fading_pdf(const TheoryParams& p, double gamma) {
  p.validate();
  if (!(gamma >= 0.0)) return 0.0;
  const double shape = fading_shape(p);
  const double scale = p.avg_snr;
  if (gamma == 0.0) return shape == 1.0 ? 1.0 / scale : 0.0;
  return std::exp((shape - 1.0) * std::log(gamma) - gamma / scale - log_gamma(shape) -
                  shape * std::log(scale));
}

double fading_upper_limit(const TheoryParams& p) {
  p.validate();
  const double k = p.num_crs;
  return p.avg_snr * (k + 40.0 * std::sqrt(k));
}

double qd_rayleigh(const TheoryParams& p, double lambda, Form form) {
  p.validate();
  check_lambda(lambda, "qd_rayleigh");
  if (lambda == 0.0) return 1.0;
  if (p.kind == CombinerKind::sls && p.sls_branches == SlsBranches::independent) {
    const double branch = fading_average(
        p, lambda, [&](double g) { return branch_tail(p, lambda, g, form); }, "qd_rayleigh");
    return any_of(branch, p.num_crs);
  }
  return fading_average(
      p, lambda,
      [&](double g) {
        return form == Form::exact ? exact_tail(p, lambda, g) : approx_tail(p, lambda, g);
      },
      "qd_rayleigh");
}

WindowStats avg_stats(const TheoryParams& p, double gamma) {
  p.validate();
  check_gamma(gamma, "avg_stats");
  const int l = p.history_len;
  const int m = resolve_window(p, l);
  const auto h0 = event_moments(p, 0.0);
  const auto h1 = m > 0 ? event_moments(p, gamma) : h0;
  const double ld = l;
  return {(m * h1.mean + (l - m) * h0.mean) / ld, (m * h1.variance + (l - m) * h0.variance) / (ld * ld)};
}

double predictor_prob(const TheoryParams& p, double lambda, double gamma) {
  p.validate();
  check_lambda(lambda, "predictor_prob");
  check_gamma(gamma, "predictor_prob");
  if (p.window_model == WindowModel::exact && p.kind != CombinerKind::sls) {
    // With a static SNR the window sum is itself noncentral chi-square.
    const int l = p.history_len;
    const int m = resolve_window(p, l);
    const double dof_half = 0.5 * l * p.n_samples * (p.kind == CombinerKind::slc ? p.num_crs : 1);
    return marcum_q(dof_half, std::sqrt(m * p.n_samples * gamma),
                    std::sqrt(l * lambda / p.noise_variance));
  }
  const auto s = avg_stats(p, gamma);
  return q_func((lambda - s.mean) / std::sqrt(s.variance));
}

double qfa_proposed(const TheoryParams& p, double lambda, double gamma) {
  p.validate();
  check_lambda(lambda, "qfa_proposed");
  const auto q = p.with_window(resolve_window(p, 0));
  const double pp = predictor_prob(q, lambda, gamma);
  const double low = event_tail(q, lambda / q.rho, 0.0);
  const double high = event_tail(q, lambda * q.rho, 0.0);
  return std::clamp(pp * (low - high) + high, 0.0, 1.0);
}

double qd_proposed_awgn(const TheoryParams& p, double lambda, double gamma) {
  p.validate();
  check_lambda(lambda, "qd_proposed_awgn");
  const auto q = p.with_window(resolve_window(p, p.history_len));
  const double pp = predictor_prob(q, lambda, gamma);
  const double low = event_tail(q, lambda / q.rho, gamma);
  const double high = event_tail(q, lambda * q.rho, gamma);
  return std::clamp(pp * (low - high) + high, 0.0, 1.0);
}

double qd_proposed_rayleigh(const TheoryParams& p, double lambda) {
  p.validate();
  check_lambda(lambda, "qd_proposed_rayleigh");
  if (lambda == 0.0) return 1.0;
  return fading_average(
      p, lambda, [&](double g) { return qd_proposed_awgn(p, lambda, g); }, "qd_proposed_rayleigh");
}

}  // namespace csslab::theory
