#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "csslab/channel.hpp"
#include "csslab/errors.hpp"
#include "csslab/fusion.hpp"
#include "csslab/sensing.hpp"
#include "csslab/theory.hpp"

using namespace csslab;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
Moments sample_moments(int n, F&& draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  return {mean, s2 / n - mean * mean};
}

}  // namespace

TEST(Channel, PuSamplesAreUnitPowerBpsk) {
  Rng rng(3);
  const auto pu = channel::gen_pu_samples(20000, rng);
  double power = 0.0, sum = 0.0;
  for (const auto& s : pu) {
    EXPECT_EQ(std::abs(s.real()), 1.0);
    EXPECT_EQ(s.imag(), 0.0);
    power += std::norm(s);
    sum += s.real();
  }
  EXPECT_DOUBLE_EQ(power / pu.size(), 1.0);
  EXPECT_LT(std::abs(sum / pu.size()), 4.0 / std::sqrt(20000.0));
  EXPECT_THROW(channel::gen_pu_samples(0, rng), InvalidArgument);
}

TEST(Channel, RayleighGainHasExponentialSnr) {
  Rng rng(5);
  const double avg = 0.2;
  const int n = 200000;
  int above = 0;
  const auto m = sample_moments(n, [&] {
    const auto d = channel::draw_channel(avg, rng);
    above += d.instantaneous_snr > avg;
    return d.instantaneous_snr;
  });
  EXPECT_NEAR(m.mean, avg, 4.0 * avg / std::sqrt(n));
  EXPECT_NEAR(m.var, avg * avg, 0.02 * avg * avg);
  EXPECT_NEAR(static_cast<double>(above) / n, std::exp(-1.0), 0.005);
}

TEST(Channel, NoiseVarianceStaysInsideTheUncertaintyBand) {
  Rng rng(9);
  channel::NoiseModel model{2.0, 1.0};
  double lo_db = 10.0, hi_db = -10.0;
  for (int i = 0; i < 50000; ++i) {
    const double v = channel::draw_noise_variance(model, rng);
    ASSERT_GE(v, model.lower_bound());
    ASSERT_LE(v, model.upper_bound());
    const double db = 10.0 * std::log10(v / 2.0);
    lo_db = std::min(lo_db, db);
    hi_db = std::max(hi_db, db);
  }
  EXPECT_LT(lo_db, -0.99);
  EXPECT_GT(hi_db, 0.99);
  channel::NoiseModel exact{2.0, 0.0};
  EXPECT_EQ(channel::draw_noise_variance(exact, rng), 2.0);
  EXPECT_THROW((channel::NoiseModel{1.0, -1.0}.validate()), InvalidArgument);
}

TEST(Sensing, NoiseOnlyEnergyMatchesChiSquareMoments) {
  // 2 N sigma^4 variance, N sigma^2 mean.
  Rng rng(11);
  const std::size_t n = 200;
  const double var = 1.7;
  const auto gain = channel::awgn_channel(0.0);
  std::vector<channel::Sample> pu(n, channel::Sample{1.0, 0.0});
  const auto m = sample_moments(20000, [&] {
    return sensing::measure_energy(channel::synthesize_received(Hypothesis::h0, gain, pu, var, rng));
  });
  EXPECT_NEAR(m.mean, n * var, 4.0 * var * std::sqrt(2.0 * n / 20000.0));
  EXPECT_NEAR(m.var / (2.0 * n * var * var), 1.0, 0.05);
}

TEST(Sensing, ExactDrawMatchesSynthesizedSamples) {
  Rng a(21), b(22);
  const std::size_t n = 100;
  const auto ch = channel::awgn_channel(0.3, 1.0);
  const int trials = 20000;
  auto pu = channel::gen_pu_samples(n, a);
  const auto synth = sample_moments(trials, [&] {
    return sensing::measure_energy(channel::synthesize_received(Hypothesis::h1, ch, pu, 1.2, a));
  });
  const auto drawn = sample_moments(trials, [&] { return sensing::draw_energy(Hypothesis::h1, ch, 1.2, n, b); });
  // noncentral chi-square: mean sigma^2 (N + delta), var sigma^4 (2N + 4 delta)
  const double delta = n * 0.3 / 1.2;
  const double mean = 1.2 * (n + delta), var = 1.44 * (2.0 * n + 4.0 * delta);
  const double tol = 4.0 * std::sqrt(var / trials);
  EXPECT_NEAR(synth.mean, mean, tol);
  EXPECT_NEAR(drawn.mean, mean, tol);
  EXPECT_NEAR(synth.var / var, 1.0, 0.05);
  EXPECT_NEAR(drawn.var / var, 1.0, 0.05);
}

TEST(Sensing, ExactDrawTailMatchesTheory) {
  Rng rng(31);
  theory::TheoryParams p;
  p.kind = CombinerKind::mrc;
  p.num_crs = 1;
  p.n_samples = 400;
  const double gamma = 0.05;
  const auto ch = channel::awgn_channel(gamma);
  const double lam = 430.0;
  const int trials = 100000;
  int hits = 0;
  for (int i = 0; i < trials; ++i) hits += sensing::draw_energy(Hypothesis::h1, ch, 1.0, 400, rng) >= lam;
  const double q = theory::qd_awgn_exact(p, lam, gamma);
  EXPECT_NEAR(static_cast<double>(hits) / trials, q, 4.0 * std::sqrt(q * (1 - q) / trials));
}

TEST(Fusion, CombinersFollowTheirDefinitions) {
  std::vector<sensing::SensingReport> r = {{10.0, 1.0, 0.2, 1}, {14.0, 1.0, 0.6, 2}, {12.0, 1.0, 0.2, 3}};
  EXPECT_DOUBLE_EQ(fusion::combine(CombinerKind::slc, r), 36.0);
  EXPECT_DOUBLE_EQ(fusion::combine(CombinerKind::sls, r), 14.0);
  EXPECT_NEAR(fusion::combine(CombinerKind::mrc, r), 0.2 * 10.0 + 0.6 * 14.0 + 0.2 * 12.0, 1e-12);
  r[2].cr_index = 1;
  EXPECT_THROW(fusion::combine(CombinerKind::slc, r), InvalidArgument);
  EXPECT_THROW(fusion::combine(CombinerKind::slc, {}), InvalidArgument);
}

TEST(Fusion, MrcWeightsAreSimplexValid) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> size(1, 12);
  std::exponential_distribution<double> snr(3.0);
  std::bernoulli_distribution zero(0.2);
  for (int t = 0; t < 100000; ++t) {
    std::vector<double> g(size(rng));
    for (auto& x : g) x = zero(rng) ? 0.0 : snr(rng);
    if (std::accumulate(g.begin(), g.end(), 0.0) == 0.0) g[0] = 1.0;
    const auto w = fusion::mrc_weights(g);
    double total = 0.0;
    for (double x : w) {
      ASSERT_GE(x, 0.0);
      total += x;
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_THROW(fusion::mrc_weights(std::vector<double>{0.0, 0.0}), DegenerateWeights);
  EXPECT_THROW(fusion::mrc_weights(std::vector<double>{0.5, -0.1}), InvalidArgument);
}

TEST(Fusion, CoherentMrcAddsSnrAcrossBranches) {
  Rng rng(51);
  const std::size_t n = 200;
  const auto pu = channel::gen_pu_samples(n, rng);
  std::vector<channel::ChannelDraw> ch = {channel::awgn_channel(0.05), channel::awgn_channel(0.1),
                                          channel::awgn_channel(0.15)};
  const int trials = 20000;
  const auto m = sample_moments(trials, [&] {
    std::vector<channel::SampleBlock> blocks;
    for (const auto& c : ch) blocks.push_back(channel::synthesize_received(Hypothesis::h1, c, pu, 1.0, rng));
    return fusion::combine_coherent_mrc(blocks);
  });
  const double mean = n * (1.0 + 0.3);
  EXPECT_NEAR(m.mean, mean, 4.0 * std::sqrt((2.0 * n + 4.0 * n * 0.3) / trials));

  const std::vector<double> vars(3, 1.0);
  const auto d = sample_moments(trials, [&] {
    return fusion::draw_coherent_mrc_energy(Hypothesis::h1, ch, vars, n, rng);
  });
  EXPECT_NEAR(d.mean, mean, 4.0 * std::sqrt((2.0 * n + 4.0 * n * 0.3) / trials));
}

TEST(Fusion, CfarThresholdInvertsTheGaussianLaw) {
  for (auto kind : kAllCombiners) {
    for (int k : {1, 4, 7}) {
      fusion::FusionConfig cfg{kind, k, 1000, 1.3};
      theory::TheoryParams p;
      p.kind = kind;
      p.num_crs = k;
      p.noise_variance = 1.3;
      for (double pfa : {0.001, 0.01, 0.05, 0.1, 0.3, 0.5, 0.9})
        EXPECT_NEAR(theory::qfa_approx(p, fusion::cfar_threshold(cfg, pfa)), pfa, 1e-10);
    }
  }
  fusion::FusionConfig cfg{CombinerKind::slc, 3, 1000, 1.0};
  EXPECT_THROW(fusion::cfar_threshold(cfg, 0.0), InvalidArgument);
  EXPECT_THROW(fusion::cfar_threshold(cfg, 1.0), InvalidArgument);
  cfg.n_samples = 999;
  EXPECT_THROW(fusion::cfar_threshold(cfg, 0.1), InvalidArgument);
}

TEST(Fusion, SlsLiteralRuleDiffersFromPerBranch) {
  fusion::FusionConfig per{CombinerKind::sls, 5, 1000, 1.0, fusion::SlsThresholdRule::per_branch};
  auto lit = per;
  lit.sls_rule = fusion::SlsThresholdRule::exponent_k;
  EXPECT_GT(fusion::cfar_threshold(per, 0.1), fusion::cfar_threshold(lit, 0.1));
  per.num_crs = 1;
  lit.num_crs = 1;
  EXPECT_DOUBLE_EQ(fusion::cfar_threshold(per, 0.1), fusion::cfar_threshold(lit, 0.1));
}

TEST(Fusion, SmallTimeBandwidthWarns) {
  std::vector<std::string> seen;
  set_warning_sink([&](std::string_view m) { seen.emplace_back(m); });
  fusion::cfar_threshold(fusion::FusionConfig{CombinerKind::slc, 2, 40, 1.0}, 0.1);
  set_warning_sink(nullptr);
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_NE(seen[0].find("time-bandwidth"), std::string::npos);
}
