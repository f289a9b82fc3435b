#pragma once

#include <cstddef>
#include <span>

#include "csslab/channel.hpp"

namespace csslab::sensing {

/// What one CR ships to the fusion center for one sensing event.
struct SensingReport {
  double energy = 0.0;
  double est_noise_variance = 1.0;
  double instantaneous_snr = 0.0;
  int cr_index = 1;
};

double measure_energy(std::span<const channel::Sample> samples);
double measure_energy(const channel::SampleBlock& block);

/// Bundles the block energy with the genie noise variance and SNR.
SensingReport make_report(const channel::SampleBlock& block, int cr_index);

/// Draws measure_energy(synthesize_received(...)) directly from its exact
/// distribution, noise_variance * chi'^2_n(n * |g|^2 / noise_variance), without
/// generating samples.
double draw_energy(Hypothesis hyp, const channel::ChannelDraw& channel, double noise_variance,
                   std::size_t n, Rng& rng);

}  // namespace csslab::sensing
