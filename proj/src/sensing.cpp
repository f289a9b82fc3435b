#include "csslab/sensing.hpp"

#include <cmath>

#include "csslab/errors.hpp"

namespace csslab::sensing {

double measure_energy(std::span<const channel::Sample> samples) {
  double energy = 0.0;
  for (const auto& s : samples) energy += std::norm(s);
  return energy;
}

double measure_energy(const channel::SampleBlock& block) { return measure_energy(block.samples); }

SensingReport make_report(const channel::SampleBlock& block, int cr_index) {
  return SensingReport{measure_energy(block), block.true_noise_variance,
                       block.channel.instantaneous_snr, cr_index};
}

double draw_energy(Hypothesis hyp, const channel::ChannelDraw& channel, double noise_variance,
                   std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("draw_energy: n must be >= 1");
  if (!(noise_variance > 0.0)) throw InvalidArgument("draw_energy: noise_variance must be positive");
  const double dof = static_cast<double>(n);
  const double signal = hyp == Hypothesis::h1 ? std::norm(channel.gain) : 0.0;

  // chi'^2_n(delta) = (sqrt(delta) + Z)^2 + chi^2_{n-1}
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shifted = std::sqrt(dof * signal / noise_variance) + normal(rng);
  double rest = 0.0;
  if (n > 1) {
    std::gamma_distribution<double> chi2_half((dof - 1.0) / 2.0, 2.0);
    rest = chi2_half(rng);
  }
  return noise_variance * (shifted * shifted + rest);
}

}  // namespace csslab::sensing
