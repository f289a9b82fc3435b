#include <gtest/gtest.h>

#include <cmath>

#include "csslab/errors.hpp"
#include "csslab/harness.hpp"
#include "csslab/rng.hpp"

using namespace csslab;
using namespace csslab::harness;

namespace {

Scenario small(CombinerKind kind = CombinerKind::slc) {
  Scenario s;
  s.combiner = kind;
  s.trials = 4000;
  s.chain_length = 500;
  s.pfa_grid = {0.05, 0.2, 0.5};
  return s;
}

void expect_same(const RocCurve& a, const RocCurve& b) {
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].lambda, b.points[i].lambda);
    EXPECT_EQ(a.points[i].empirical_pfa, b.points[i].empirical_pfa);
    EXPECT_EQ(a.points[i].empirical_pd, b.points[i].empirical_pd);
    EXPECT_EQ(a.points[i].theory_pfa, b.points[i].theory_pfa);
    EXPECT_EQ(a.points[i].theory_pd, b.points[i].theory_pd);
  }
  EXPECT_EQ(a.auc, b.auc);
}

}  // namespace

TEST(Seeds, DeriveSeedIsAPureFunctionOfItsPath) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
  EXPECT_NE(seed_tag(0.1), seed_tag(0.2));
}

TEST(Scenario, ValidationNamesTheField) {
  auto expect_field = [](Scenario s, const std::string& field) {
    try {
      s.validate();
      ADD_FAILURE() << "no error for " << field;
    } catch (const InvalidArgument& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field + ":", 0), 0u) << e.what();
    }
  };
  Scenario s;
  s.n_samples = 1001;
  expect_field(s, "n_samples");
  s = {};
  s.pfa_grid = {0.2, 0.1};
  expect_field(s, "pfa_grid");
  s = {};
  s.pu_model = {PuKind::markov, 20.0};
  expect_field(s, "pu_model");
  s = {};
  s.rho_override = 0.5;
  expect_field(s, "rho_override");
  s = {};
  s.equivalence_k_range = {3, 3};
  expect_field(s, "equivalence_k_range");
  EXPECT_NO_THROW(Scenario{}.validate());
}

TEST(Harness, OutputsDoNotDependOnThreadCount) {
  for (auto kind : kAllCombiners) {
    const auto s = small(kind);
    const auto one = compare_sweep(s, 1);
    const auto many = compare_sweep(s, 4);
    expect_same(one.conventional, many.conventional);
    expect_same(one.proposed, many.proposed);
  }
}

TEST(Harness, SeedChangesTheDraws) {
  auto s = small();
  const auto a = roc_sweep(s, Scheme::conventional);
  s.seed = 2;
  const auto b = roc_sweep(s, Scheme::conventional);
  EXPECT_NE(a.points[1].empirical_pd, b.points[1].empirical_pd);
}

TEST(Harness, NoUncertaintyMeansNoDisagreement) {
  for (auto kind : kAllCombiners) {
    auto s = small(kind);
    s.uncertainty_db = 0.0;
    const double lam = fusion::cfar_threshold(s.fusion_config(), 0.1);
    for (auto h : {Hypothesis::h0, Hypothesis::h1}) {
      const auto c = simulate_paired(s, h, lam, 99);
      EXPECT_EQ(c.events, s.trials);
      EXPECT_EQ(c.disagreements, 0);
      EXPECT_EQ(c.mean_rho(), 1.0);
    }
  }
}

TEST(Harness, WarmupEventsAreNotCounted) {
  auto s = small();
  s.trials = 1234;
  s.chain_length = 100;
  const auto c = simulate_paired(s, Hypothesis::h0, 1.0, 5);
  EXPECT_EQ(c.events, 1234);
}

TEST(Harness, ConventionalFalseAlarmMatchesTheExactLaw) {
  for (auto kind : kAllCombiners) {
    auto s = small(kind);
    s.uncertainty_db = 0.0;
    s.trials = 40000;
    const auto tp = s.theory_params();
    const double lam = fusion::cfar_threshold(s.fusion_config(), 0.1);
    const auto r = run_regime(
        [&] {
          auto t = s;
          t.pu_model = {PuKind::forced_h0, 0.0};
          return t;
        }(),
        Scheme::conventional, lam);
    const double q = theory::qfa_exact(tp, lam);
    EXPECT_NEAR(r.rate, q, 4.0 * std::sqrt(q * (1 - q) / s.trials)) << to_string(kind);
  }
}

TEST(Harness, SampleFidelityAgreesWithTheEnergySampler) {
  for (auto kind : kAllCombiners) {
    auto s = small(kind);
    s.n_samples = 200;
    s.num_crs = 3;
    s.snr_db = -8.0;
    s.uncertainty_db = 0.0;
    s.trials = 6000;
    s.pfa_grid = {0.1};
    const auto fast = roc_sweep(s, Scheme::conventional);
    s.fidelity = Fidelity::samples;
    const auto slow = roc_sweep(s, Scheme::conventional);
    const auto& a = fast.points[0];
    const auto& b = slow.points[0];
    EXPECT_NEAR(a.empirical_pfa, b.empirical_pfa, 1.5 * (a.empirical_pfa_ci + b.empirical_pfa_ci));
    EXPECT_NEAR(a.empirical_pd, b.empirical_pd, 1.5 * (a.empirical_pd_ci + b.empirical_pd_ci));
    EXPECT_NEAR(b.empirical_pd, b.theory_pd, 1.5 * b.empirical_pd_ci + 0.01) << to_string(kind);
  }
}

TEST(Harness, EnergyWeightedMrcRuns) {
  auto s = small(CombinerKind::mrc);
  s.mrc_mode = MrcMode::energy_weighted;
  const auto c = roc_sweep(s, Scheme::conventional);
  for (const auto& p : c.points) {
    EXPECT_GE(p.empirical_pd, 0.0);
    EXPECT_LE(p.empirical_pd, 1.0);
  }
}

TEST(Auc, TrapezoidWithAnchors) {
  RocPoint a, b;
  a.empirical_pfa = 0.2;
  a.empirical_pd = 0.6;
  b.empirical_pfa = 0.5;
  b.empirical_pd = 0.9;
  a.trials = b.trials = 1000000000;
  // (0,0)-(0.2,0.6)-(0.5,0.9)-(1,1)
  const double expected = 0.2 * 0.3 + 0.3 * 0.75 + 0.5 * 0.95;
  const auto est = roc_auc({b, a});
  EXPECT_NEAR(est.auc, expected, 1e-15);
  EXPECT_LT(est.se, 1e-4);
}

TEST(Auc, StandardErrorMatchesTheDeltaMethod) {
  RocPoint p;
  p.empirical_pfa = 0.3;
  p.empirical_pd = 0.8;
  p.trials = 400;
  // A = 0.3 * 0.8 / 2 + 0.7 * 1.8 / 2; dA/dx = (0 - 1) / 2, dA/dy = (1 - 0) / 2
  const double var = 0.25 * 0.3 * 0.7 / 400 + 0.25 * 0.8 * 0.2 / 400;
  const auto est = roc_auc({p});
  EXPECT_NEAR(est.auc, 0.12 + 0.63, 1e-15);
  EXPECT_NEAR(est.se, std::sqrt(var), 1e-15);
}

TEST(Harness, CiHalfWidth) {
  EXPECT_DOUBLE_EQ(ci_halfwidth(0.5, 100), 0.15);
  EXPECT_EQ(ci_halfwidth(0.0, 100), 0.0);
}

TEST(Harness, SweepsAndSearchValidateTheirInputs) {
  const auto s = small();
  EXPECT_THROW(sweep_param(s, SweepParam::history_len, {}), InvalidArgument);
  EXPECT_THROW(sweep_param(s, SweepParam::history_len, {1}), InvalidArgument);
  EXPECT_THROW(equivalence_search(s, 3, {5, 3}), InvalidArgument);
  const auto curves = sweep_param(s, SweepParam::num_crs, {1, 2});
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[1].scenario.num_crs, 2);
  EXPECT_EQ(curves[0].scheme, Scheme::proposed);
}

TEST(Harness, MarkovRunCountsBothStates) {
  auto s = small();
  s.pu_model = {PuKind::markov, 200.0};
  s.trials = 20000;
  const auto r = run_markov(s, fusion::cfar_threshold(s.fusion_config(), 0.1));
  EXPECT_EQ(r.events, s.trials);
  EXPECT_GT(r.toggles, 20);
  const auto& t = r.conventional;
  EXPECT_EQ(t.h0_near + t.h0_far + t.h1_near + t.h1_far, r.events);
  EXPECT_GT(t.h0_far, 0);
  EXPECT_GT(t.h1_far, 0);
  EXPECT_THROW(run_markov(small(), 1.0), InvalidArgument);
}
