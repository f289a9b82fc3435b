#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <utility>

#include "csslab/fusion.hpp"
#include "csslab/sensing.hpp"
#include "csslab/types.hpp"

namespace csslab::adaptive {

/// Rolling window of the last L combined energies and mean noise variances.
///
/// Sums are kept incrementally and re-derived from the stored values once per
/// L pushes, so floating-point drift never accumulates past one window. The
/// variance extrema use monotonic deques, which makes every push amortized O(1).
class FusionState {
 public:
  explicit FusionState(int capacity);

  void push(double e_comb, double sigma_mean_sq);
  void clear();

  int capacity() const { return capacity_; }
  std::size_t size() const { return energies_.size(); }
  bool empty() const { return energies_.empty(); }
  bool full() const { return size() == static_cast<std::size_t>(capacity_); }

  const std::deque<double>& energy_history() const { return energies_; }
  const std::deque<double>& variance_history() const { return variances_; }

  double running_energy_sum() const { return energy_sum_; }
  double running_variance_sum() const { return variance_sum_; }
  double running_variance_max() const;
  double running_variance_min() const;

 private:
  void resum();

  int capacity_;
  std::deque<double> energies_;
  std::deque<double> variances_;
  std::deque<double> max_queue_;  // non-increasing
  std::deque<double> min_queue_;  // non-decreasing
  double energy_sum_ = 0.0;
  double variance_sum_ = 0.0;
  std::size_t pushes_since_resum_ = 0;
};

struct Prediction {
  double e_avg = 0.0;
  Hypothesis predicted = Hypothesis::h0;
};

struct AdaptiveDecision {
  Hypothesis decision = Hypothesis::h0;
  Hypothesis predicted = Hypothesis::h0;
  double e_avg = 0.0;
  double rho = 1.0;
  double lambda_base = 0.0;
  double lambda_new = 0.0;
};

/// Mean of the reported noise variances.
double mean_variance(std::span<const sensing::SensingReport> reports);

void push_event(FusionState& state, double e_comb, double sigma_mean_sq);

/// Window average against the base threshold; requires a full window.
Prediction predict_activity(const FusionState& state, double lambda_base);

/// max / mean of the stored mean variances; exactly 1 when they are all equal.
double estimate_rho(const FusionState& state);

/// lambda/rho when H1 is predicted, rho*lambda otherwise.
double dynamic_threshold(double lambda_base, double rho, Hypothesis predicted);

/// Pushes the current event and decides against the dynamic threshold. The
/// state must already hold L-1 events. `rho_override` replaces the estimated
/// noise-uncertainty factor (used to pin rho in validation runs).
AdaptiveDecision decide_proposed(FusionState& state, double e_comb, double sigma_mean_sq,
                                 double lambda_base,
                                 std::optional<double> rho_override = std::nullopt);

/// Full pipeline from CR reports: combine, mean variance, then decide.
AdaptiveDecision decide_proposed(FusionState& state,
                                 std::span<const sensing::SensingReport> reports,
                                 CombinerKind kind, const fusion::FusionConfig& cfg,
                                 double lambda_base);

/// A simulated fusion center: during the first L-1 events it decides
/// conventionally while filling the history, then switches to the proposed rule.
class FusionCenter {
 public:
  FusionCenter(int history_len, double lambda_base,
               std::optional<double> rho_override = std::nullopt);

  struct Outcome {
    AdaptiveDecision decision;
    bool warmup = false;
  };

  Outcome observe(double e_comb, double sigma_mean_sq);
  void reset() { state_.clear(); }

  const FusionState& state() const { return state_; }
  double lambda_base() const { return lambda_base_; }

 private:
  FusionState state_;
  double lambda_base_;
  std::optional<double> rho_override_;
};

}  // namespace csslab::adaptive
