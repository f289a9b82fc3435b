#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csslab/fusion.hpp"
#include "csslab/theory.hpp"
#include "csslab/types.hpp"

namespace csslab::harness {

enum class Scheme { conventional, proposed };
enum class ChannelKind { rayleigh, awgn };
enum class PuKind { forced_h0, forced_h1, markov };

struct PuModel {
  PuKind kind = PuKind::forced_h1;
  double mean_dwell_events = 0.0;  // markov only
};

/// Coherent pre-detection combining or the energy-domain weighted sum.
enum class MrcMode { coherent, energy_weighted };

/// Whether fading is redrawn every event or held for a whole chain.
enum class FadingCoherence { event, chain };

/// Independent gains per CR, or one gain shared by every CR.
enum class BranchFading { independent, common };

/// Energy drawn from its exact law, or measured from synthesized samples.
enum class Fidelity { energy, samples };

std::vector<double> default_pfa_grid();

struct Scenario {
  double snr_db = -15.0;
  int n_samples = 1000;
  int num_crs = 7;
  int history_len = 15;
  double uncertainty_db = 1.0;
  CombinerKind combiner = CombinerKind::slc;
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  std::vector<double> pfa_grid = default_pfa_grid();
  ChannelKind channel = ChannelKind::rayleigh;
  PuModel pu_model;

  double nominal_variance = 1.0;
  MrcMode mrc_mode = MrcMode::coherent;
  FadingCoherence fading_coherence = FadingCoherence::event;
  BranchFading branch_fading = BranchFading::independent;
  int chain_length = 1000;  // counted events per chain (each chain adds L-1 warm-up events)
  std::optional<double> rho_override;
  fusion::SlsThresholdRule sls_threshold = fusion::SlsThresholdRule::per_branch;
  Fidelity fidelity = Fidelity::energy;
  theory::WindowModel window_model = theory::WindowModel::gaussian;

  std::vector<int> sweep_l_values = {5, 10, 15, 20};
  std::vector<int> sweep_k_values = {1, 3, 5, 7};
  std::vector<int> equivalence_k_range = {3, 5, 10, 15, 20, 25, 30, 35, 40, 50, 60};
  int equivalence_k_proposed = 3;

  double avg_snr() const;
  void validate() const;
  fusion::FusionConfig fusion_config() const;
  theory::TheoryParams theory_params() const;
};

/// Decision counts from one paired run: both schemes see the same events.
struct PairedCounts {
  std::int64_t events = 0;
  std::int64_t conventional_positive = 0;
  std::int64_t proposed_positive = 0;
  std::int64_t disagreements = 0;
  double rho_sum = 0.0;  // over counted proposed decisions

  double rate(Scheme s) const;
  double mean_rho() const { return events > 0 ? rho_sum / static_cast<double>(events) : 1.0; }
  PairedCounts& operator+=(const PairedCounts& other);
};

struct RegimeResult {
  double rate = 0.0;
  double ci_halfwidth = 0.0;  // 3 binomial standard errors
  std::int64_t trials = 0;
};

/// 3 * sqrt(p (1 - p) / n)
double ci_halfwidth(double rate, std::int64_t n);

/// Runs `s.trials` counted events under a forced hypothesis for both schemes.
PairedCounts simulate_paired(const Scenario& s, Hypothesis truth, double lambda,
                             std::uint64_t stream_seed, int threads = 1);

/// Decision-positive rate under the scenario's PU model.
RegimeResult run_regime(const Scenario& s, Scheme scheme, double lambda, int threads = 1);

struct RocPoint {
  double target_pfa = 0.0;
  double lambda = 0.0;
  double empirical_pfa = 0.0;
  double empirical_pfa_ci = 0.0;
  double empirical_pd = 0.0;
  double empirical_pd_ci = 0.0;
  double theory_pfa = 0.0;
  double theory_pd = 0.0;
  std::int64_t trials = 0;
  double mean_rho_h0 = 1.0;
  double mean_rho_h1 = 1.0;
};

struct RocCurve {
  Scheme scheme = Scheme::conventional;
  Scenario scenario;
  std::vector<RocPoint> points;
  double auc = 0.0;
  double auc_se = 0.0;
};

struct AucEstimate {
  double auc = 0.0;
  double se = 0.0;
};

/// Trapezoid over the points sorted by empirical P_fa, anchored at (0,0) and
/// (1,1); the standard error propagates the binomial variance of every point.
AucEstimate roc_auc(const std::vector<RocPoint>& points);

struct RocPair {
  RocCurve conventional;
  RocCurve proposed;
};

/// Conventional and proposed curves from one set of paired runs.
RocPair compare_sweep(const Scenario& s, int threads = 1);
RocCurve roc_sweep(const Scenario& s, Scheme scheme, int threads = 1);

enum class SweepParam { history_len, num_crs };

/// One proposed-scheme curve per value, all on the base seed.
std::vector<RocCurve> sweep_param(const Scenario& base, SweepParam param,
                                  const std::vector<int>& values, int threads = 1);

struct EquivalenceResult {
  int k_proposed = 0;
  double proposed_auc = 0.0;
  double proposed_auc_se = 0.0;
  int k_match = -1;       // -1 when no K in the range gets within 0.02
  double auc_gap = 0.0;   // proposed AUC minus conventional AUC at k_match (or at the largest K)
  std::vector<int> k_values;
  std::vector<double> conventional_auc;
  std::vector<double> conventional_auc_se;
};

/// Smallest conventional K whose AUC gets within `tolerance` of the proposed
/// scheme at `k_proposed`. The range is scanned in ascending order.
EquivalenceResult equivalence_search(const Scenario& s, int k_proposed,
                                     const std::vector<int>& k_range, int threads = 1,
                                     double tolerance = 0.02);

/// Error rates close to PU state changes versus far from them.
struct TransitionRates {
  double pfa_near = 0.0;
  double pfa_far = 0.0;
  double pmd_near = 0.0;
  double pmd_far = 0.0;
  std::int64_t h0_near = 0, h0_far = 0, h1_near = 0, h1_far = 0;

  double excess_pfa() const { return pfa_near - pfa_far; }
  double excess_pmd() const { return pmd_near - pmd_far; }
};

struct MarkovReport {
  std::int64_t events = 0;
  std::int64_t toggles = 0;
  TransitionRates conventional;
  TransitionRates proposed;
};

/// Runs the markov PU model; "near" means within L events of a toggle.
MarkovReport run_markov(const Scenario& s, double lambda, int threads = 1);

std::string_view to_string(Scheme s);
std::string_view to_string(ChannelKind c);
std::string_view to_string(MrcMode m);
std::string_view to_string(FadingCoherence f);
std::string_view to_string(BranchFading b);
std::string_view to_string(Fidelity f);
std::string to_string(const PuModel& m);

}  // namespace csslab::harness
