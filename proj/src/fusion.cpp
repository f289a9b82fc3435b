#include "csslab/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csslab/errors.hpp"
#include "csslab/special.hpp"

namespace csslab::fusion {

void FusionConfig::validate() const {
  if (num_crs < 1) throw InvalidArgument("fusion config: num_crs must be >= 1");
  if (n_samples < 2 || n_samples % 2 != 0)
    throw InvalidArgument("fusion config: n_samples must be even and >= 2 (N = 2u)");
  if (!(nominal_variance > 0.0))
    throw InvalidArgument("fusion config: nominal_variance must be positive");
}

std::vector<double> mrc_weights(std::span<const double> snrs) {
  if (snrs.empty()) throw InvalidArgument("mrc_weights: no branches");
  double total = 0.0;
  for (double g : snrs) {
    if (!(g >= 0.0)) throw InvalidArgument("mrc_weights: SNRs must be nonnegative");
    total += g;
  }
  if (!(total > 0.0)) throw DegenerateWeights("mrc_weights: every branch SNR is zero");
  std::vector<double> w(snrs.size());
  std::transform(snrs.begin(), snrs.end(), w.begin(), [total](double g) { return g / total; });
  return w;
}

double combine(CombinerKind kind, std::span<const sensing::SensingReport> reports) {
  if (reports.empty()) throw InvalidArgument("combine: empty report set");
  std::vector<int> ids;
  ids.reserve(reports.size());
  for (const auto& r : reports) ids.push_back(r.cr_index);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw InvalidArgument("combine: duplicate cr_index in report set");

  switch (kind) {
    case CombinerKind::slc: {
      double sum = 0.0;
      for (const auto& r : reports) sum += r.energy;
      return sum;
    }
    case CombinerKind::mrc: {
      std::vector<double> snrs;
      snrs.reserve(reports.size());
      for (const auto& r : reports) snrs.push_back(r.instantaneous_snr);
      const auto w = mrc_weights(snrs);
      double sum = 0.0;
      for (std::size_t j = 0; j < reports.size(); ++j) sum += w[j] * reports[j].energy;
      return sum;
    }
    case CombinerKind::sls: {
      double best = reports.front().energy;
      for (const auto& r : reports) best = std::max(best, r.energy);
      return best;
    }
  }
  throw InvalidArgument("combine: unknown combiner");
}

double combine_coherent_mrc(std::span<const channel::SampleBlock> blocks) {
  if (blocks.empty()) throw InvalidArgument("combine_coherent_mrc: no blocks");
  const std::size_t n = blocks.front().samples.size();
  double norm_sq = 0.0;
  for (const auto& b : blocks) {
    if (b.samples.size() != n) throw InvalidArgument("combine_coherent_mrc: block lengths differ");
    norm_sq += std::norm(b.channel.gain);
  }
  if (!(norm_sq > 0.0)) throw DegenerateWeights("combine_coherent_mrc: every branch gain is zero");
  const double scale = 1.0 / std::sqrt(norm_sq);

  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    channel::Sample z{0.0, 0.0};
    for (const auto& b : blocks) z += std::abs(b.channel.gain) * b.samples[i];
    energy += std::norm(z * scale);
  }
  return energy;
}

double draw_coherent_mrc_energy(Hypothesis hyp, std::span<const channel::ChannelDraw> channels,
                                std::span<const double> noise_variances, std::size_t n, Rng& rng) {
  if (channels.empty() || channels.size() != noise_variances.size())
    throw InvalidArgument("draw_coherent_mrc_energy: need one noise variance per branch");
  double norm_sq = 0.0;
  double weighted_noise = 0.0;
  for (std::size_t j = 0; j < channels.size(); ++j) {
    const double g2 = std::norm(channels[j].gain);
    norm_sq += g2;
    weighted_noise += g2 * noise_variances[j];
  }
  if (!(norm_sq > 0.0))
    throw DegenerateWeights("draw_coherent_mrc_energy: every branch gain is zero");
  const double combined_noise = weighted_noise / norm_sq;
  channel::ChannelDraw combined;
  combined.gain = channel::Sample{std::sqrt(norm_sq), 0.0};
  return sensing::draw_energy(hyp, combined, combined_noise, n, rng);
}

double cfar_threshold(const FusionConfig& cfg, double target_pfa) {
  cfg.validate();
  if (!(target_pfa > 0.0 && target_pfa < 1.0))
    throw InvalidArgument("cfar_threshold: target_pfa must lie in (0, 1)");
  const double u = cfg.tbw_product();
  if (u < 50.0)
    warn("cfar_threshold: time-bandwidth product " + std::to_string(cfg.tbw_product()) +
         " is small for the Gaussian approximation");

  const double sigma2 = cfg.nominal_variance;
  const double k = cfg.num_crs;
  auto gaussian_threshold = [sigma2](double pfa, double dof_half) {
    return sigma2 * (theory::inv_erfc(2.0 * pfa) * 2.0 * std::sqrt(2.0 * dof_half) + 2.0 * dof_half);
  };

  switch (cfg.kind) {
    case CombinerKind::slc: return gaussian_threshold(target_pfa, k * u);
    case CombinerKind::mrc: return gaussian_threshold(target_pfa, u);
    case CombinerKind::sls: {
      if (cfg.sls_rule == SlsThresholdRule::exponent_k) {
        const double mapped = -std::expm1(k * std::log1p(-target_pfa));
        return gaussian_threshold(mapped, u);
      }
      const double branch = -std::expm1(std::log1p(-target_pfa) / k);
      return gaussian_threshold(branch, u);
    }
  }
  throw InvalidArgument("cfar_threshold: unknown combiner");
}

Hypothesis decide_conventional(double combined_energy, double threshold) {
  return combined_energy >= threshold ? Hypothesis::h1 : Hypothesis::h0;
}

}  // namespace csslab::fusion
