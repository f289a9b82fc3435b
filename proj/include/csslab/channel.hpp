#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "csslab/rng.hpp"
#include "csslab/types.hpp"

namespace csslab::channel {

using Sample = std::complex<double>;

/// Flat-fading gain for one CR over one sensing event.
struct ChannelDraw {
  Sample gain{0.0, 0.0};
  double instantaneous_snr = 0.0;  // |gain|^2 * signal power / nominal noise power
};

/// Uniform-in-dB noise uncertainty around a nominal variance.
struct NoiseModel {
  double nominal_variance = 1.0;
  double uncertainty_db = 0.0;

  void validate() const;
  double lower_bound() const;
  double upper_bound() const;
};

struct SampleBlock {
  std::vector<Sample> samples;
  Hypothesis true_hypothesis = Hypothesis::h0;
  double true_noise_variance = 1.0;
  ChannelDraw channel;
};

/// Unit-power BPSK symbols on the real axis.
std::vector<Sample> gen_pu_samples(std::size_t n, Rng& rng);

/// Circularly-symmetric complex Gaussian gain with E|g|^2 = avg_snr * noise_power,
/// so the instantaneous SNR is exponential with mean avg_snr.
ChannelDraw draw_channel(double avg_snr, Rng& rng, double noise_power = 1.0);

/// Deterministic (non-fading) gain delivering exactly `snr`.
ChannelDraw awgn_channel(double snr, double noise_power = 1.0);

double draw_noise_variance(const NoiseModel& model, Rng& rng);

/// Received block for one CR. Samples live on the in-phase rail: the PU term
/// is |gain| * pu[n] and the noise is real N(0, noise_variance), so the block
/// energy has N degrees of freedom.
SampleBlock synthesize_received(Hypothesis hyp, const ChannelDraw& channel,
                                std::span<const Sample> pu, double noise_variance, Rng& rng);

}  // namespace csslab::channel
