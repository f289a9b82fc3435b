#pragma once

#include "csslab/special.hpp"
#include "csslab/types.hpp"

namespace csslab::theory {

/// How SLS branch SNRs behave under fading.
enum class SlsBranches {
  independent,  // i.i.d. exponential per branch
  common,       // every branch sees the same exponential SNR draw
};

/// Distributional model behind the dual-threshold formulas.
enum class WindowModel {
  gaussian,  // Gaussian laws, (gamma + 1)^2 variance scaling, SLS window uses one branch
  exact,  // chi-square laws for SLC/MRC; SLS window uses moments of the branch maximum
};

/// Exact (Marcum/incomplete gamma) or Gaussian (CLT) detection law.
enum class Form { exact, approx };

/// Inputs shared by every analytical operation.
///
/// SNR arguments named `gamma` are combiner-level: for SLC and MRC they are the
/// combined SNR sum_j gamma_j, for SLS the per-branch SNR (all branches equal).
struct TheoryParams {
  CombinerKind kind = CombinerKind::slc;
  int num_crs = 1;           // K
  int n_samples = 1000;      // N, even; u = N / 2
  double noise_variance = 1.0;
  double avg_snr = 1.0;      // per-branch average SNR (linear)
  double rho = 1.0;
  int history_len = 15;      // L
  int window_h1_events = -1; // M; negative means L for detection, 0 for false alarm
  SlsBranches sls_branches = SlsBranches::independent;
  WindowModel window_model = WindowModel::gaussian;

  int tbw_product() const { return n_samples / 2; }
  void validate() const;

  TheoryParams with_window(int h1_events) const;
  TheoryParams with_rho(double value) const;
};

struct WindowStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Combined SNR an AWGN link at per-branch SNR `avg_snr` delivers to the combiner.
double awgn_gamma(const TheoryParams& p);

/// Exact false-alarm probability.
double qfa_exact(const TheoryParams& p, double lambda);

/// Exact AWGN detection probability at combiner-level SNR `gamma`.
double qd_awgn_exact(const TheoryParams& p, double lambda, double gamma);

/// Gaussian-approximation false-alarm probability.
double qfa_approx(const TheoryParams& p, double lambda);

/// Gaussian-approximation AWGN detection probability.
double qd_awgn_approx(const TheoryParams& p, double lambda, double gamma);

/// Detection probability averaged over the Rayleigh SNR density.
double qd_rayleigh(const TheoryParams& p, double lambda, Form form = Form::exact);

/// Density of the combiner-level SNR under Rayleigh fading: gamma(K, avg_snr)
/// for SLC/MRC, exponential(avg_snr) per branch for SLS.
double fading_pdf(const TheoryParams& p, double gamma);

/// Truncation point avg_snr * (K + 40 sqrt(K)) of the fading integrals.
double fading_upper_limit(const TheoryParams& p);

/// Mean and variance of the window average under M H1 events out of L
/// (a negative M is read as L).
WindowStats avg_stats(const TheoryParams& p, double gamma);

/// Probability that the window average reaches lambda (H1 predicted).
double predictor_prob(const TheoryParams& p, double lambda, double gamma);

/// False-alarm probability of the dual-threshold scheme.
double qfa_proposed(const TheoryParams& p, double lambda, double gamma = 0.0);

/// AWGN detection probability of the dual-threshold scheme.
double qd_proposed_awgn(const TheoryParams& p, double lambda, double gamma);

/// Rayleigh-averaged detection probability of the dual-threshold scheme; the
/// predictor sees the same SNR as the current event (window-static fading).
double qd_proposed_rayleigh(const TheoryParams& p, double lambda);

}  // namespace csslab::theory
