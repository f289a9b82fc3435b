#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csslab/channel.hpp"
#include "csslab/sensing.hpp"
#include "csslab/types.hpp"

namespace csslab::fusion {

/// How the SLS CFAR threshold maps the network false-alarm target onto a branch.
enum class SlsThresholdRule {
  per_branch,     // p = 1 - (1 - Pfa)^(1/K); inverts the SLS false-alarm law
  exponent_k,  // 1 - (1 - Pfa)^K, kept for comparison runs only
};

struct FusionConfig {
  CombinerKind kind = CombinerKind::slc;
  int num_crs = 1;
  int n_samples = 2;  // N; the time-bandwidth product is N / 2
  double nominal_variance = 1.0;
  SlsThresholdRule sls_rule = SlsThresholdRule::per_branch;

  int tbw_product() const { return n_samples / 2; }
  void validate() const;
};

/// w_j = snr_j / sum(snr).
std::vector<double> mrc_weights(std::span<const double> snrs);

/// SLC: sum, MRC: SNR-weighted sum, SLS: max of the reported energies.
double combine(CombinerKind kind, std::span<const sensing::SensingReport> reports);

/// Energy of the pre-detection maximal-ratio combination of the CR blocks,
/// z(n) = sum_j |g_j| y_j(n) / ||g||. Its noise variance stays at the
/// (gain-weighted) branch variance while the SNR adds across branches.
double combine_coherent_mrc(std::span<const channel::SampleBlock> blocks);

/// Exact-distribution draw of combine_coherent_mrc for the given branches.
double draw_coherent_mrc_energy(Hypothesis hyp, std::span<const channel::ChannelDraw> channels,
                                std::span<const double> noise_variances, std::size_t n, Rng& rng);

/// Gaussian-approximation CFAR threshold for the configured combiner.
double cfar_threshold(const FusionConfig& cfg, double target_pfa);

/// H1 iff combined_energy >= threshold.
Hypothesis decide_conventional(double combined_energy, double threshold);

}  // namespace csslab::fusion
