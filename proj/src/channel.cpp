#include "csslab/channel.hpp"

#include <cmath>
#include <string>

#include "csslab/errors.hpp"

namespace csslab::channel {

void NoiseModel::validate() const {
  if (!(nominal_variance > 0.0) || !std::isfinite(nominal_variance))
    throw InvalidArgument("noise model: nominal_variance must be positive");
  if (!(uncertainty_db >= 0.0) || !std::isfinite(uncertainty_db))
    throw InvalidArgument("noise model: uncertainty_db must be nonnegative");
}

double NoiseModel::lower_bound() const {
  return nominal_variance * std::pow(10.0, -uncertainty_db / 10.0);
}

double NoiseModel::upper_bound() const {
  return nominal_variance * std::pow(10.0, uncertainty_db / 10.0);
}

std::vector<Sample> gen_pu_samples(std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("gen_pu_samples: n must be >= 1");
  std::bernoulli_distribution bit(0.5);
  std::vector<Sample> out(n);
  for (auto& s : out) s = Sample{bit(rng) ? 1.0 : -1.0, 0.0};
  return out;
}

ChannelDraw draw_channel(double avg_snr, Rng& rng, double noise_power) {
  if (!(avg_snr > 0.0) || !std::isfinite(avg_snr))
    throw InvalidArgument("draw_channel: avg_snr must be positive");
  if (!(noise_power > 0.0)) throw InvalidArgument("draw_channel: noise_power must be positive");
  std::normal_distribution<double> normal(0.0, std::sqrt(avg_snr * noise_power / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  ChannelDraw draw;
  draw.gain = Sample{re, im};
  draw.instantaneous_snr = std::norm(draw.gain) / noise_power;
  return draw;
}

ChannelDraw awgn_channel(double snr, double noise_power) {
  if (!(snr >= 0.0)) throw InvalidArgument("awgn_channel: snr must be nonnegative");
  if (!(noise_power > 0.0)) throw InvalidArgument("awgn_channel: noise_power must be positive");
  ChannelDraw draw;
  draw.gain = Sample{std::sqrt(snr * noise_power), 0.0};
  draw.instantaneous_snr = snr;
  return draw;
}

double draw_noise_variance(const NoiseModel& model, Rng& rng) {
  // Always consume one uniform so the stream layout does not depend on the width.
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double offset_db = model.uncertainty_db * unit(rng);
  if (model.uncertainty_db == 0.0) return model.nominal_variance;
  return model.nominal_variance * std::pow(10.0, offset_db / 10.0);
}

SampleBlock synthesize_received(Hypothesis hyp, const ChannelDraw& channel,
                                std::span<const Sample> pu, double noise_variance, Rng& rng) {
  if (pu.empty()) throw InvalidArgument("synthesize_received: empty PU sequence");
  if (!(noise_variance > 0.0))
    throw InvalidArgument("synthesize_received: noise_variance must be positive");
  std::normal_distribution<double> noise(0.0, std::sqrt(noise_variance));
  const double amplitude = hyp == Hypothesis::h1 ? std::abs(channel.gain) : 0.0;

  SampleBlock block;
  block.true_hypothesis = hyp;
  block.true_noise_variance = noise_variance;
  block.channel = channel;
  block.samples.resize(pu.size());
  for (std::size_t n = 0; n < pu.size(); ++n)
    block.samples[n] = amplitude * pu[n] + Sample{noise(rng), 0.0};
  return block;
}

}  // namespace csslab::channel
