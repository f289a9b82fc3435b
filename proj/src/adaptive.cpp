#include "csslab/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csslab/errors.hpp"

namespace csslab::adaptive {

FusionState::FusionState(int capacity) : capacity_(capacity) {
  if (capacity < 2) throw InvalidArgument("FusionState: history length L must be >= 2");
}

void FusionState::push(double e_comb, double sigma_mean_sq) {
  energies_.push_back(e_comb);
  variances_.push_back(sigma_mean_sq);
  energy_sum_ += e_comb;
  variance_sum_ += sigma_mean_sq;

  while (!max_queue_.empty() && max_queue_.back() < sigma_mean_sq) max_queue_.pop_back();
  max_queue_.push_back(sigma_mean_sq);
  while (!min_queue_.empty() && min_queue_.back() > sigma_mean_sq) min_queue_.pop_back();
  min_queue_.push_back(sigma_mean_sq);

  if (energies_.size() > static_cast<std::size_t>(capacity_)) {
    const double old_e = energies_.front();
    const double old_v = variances_.front();
    energies_.pop_front();
    variances_.pop_front();
    energy_sum_ -= old_e;
    variance_sum_ -= old_v;
    if (max_queue_.front() == old_v) max_queue_.pop_front();
    if (min_queue_.front() == old_v) min_queue_.pop_front();
  }

  if (++pushes_since_resum_ >= static_cast<std::size_t>(capacity_)) resum();
}

void FusionState::resum() {
  energy_sum_ = 0.0;
  variance_sum_ = 0.0;
  for (double e : energies_) energy_sum_ += e;
  for (double v : variances_) variance_sum_ += v;
  pushes_since_resum_ = 0;
}

void FusionState::clear() {
  energies_.clear();
  variances_.clear();
  max_queue_.clear();
  min_queue_.clear();
  energy_sum_ = 0.0;
  variance_sum_ = 0.0;
  pushes_since_resum_ = 0;
}

double FusionState::running_variance_max() const {
  if (max_queue_.empty()) throw InvalidArgument("FusionState: empty variance history");
  return max_queue_.front();
}

double FusionState::running_variance_min() const {
  if (min_queue_.empty()) throw InvalidArgument("FusionState: empty variance history");
  return min_queue_.front();
}

double mean_variance(std::span<const sensing::SensingReport> reports) {
  if (reports.empty()) throw InvalidArgument("mean_variance: empty report set");
  double sum = 0.0;
  for (const auto& r : reports) sum += r.est_noise_variance;
  return sum / static_cast<double>(reports.size());
}

void push_event(FusionState& state, double e_comb, double sigma_mean_sq) {
  state.push(e_comb, sigma_mean_sq);
}

Prediction predict_activity(const FusionState& state, double lambda_base) {
  if (!state.full())
    throw WarmupIncomplete("predict_activity: history holds " + std::to_string(state.size()) +
                           " of " + std::to_string(state.capacity()) + " events");
  Prediction p;
  p.e_avg = state.running_energy_sum() / static_cast<double>(state.capacity());
  p.predicted = p.e_avg >= lambda_base ? Hypothesis::h1 : Hypothesis::h0;
  return p;
}

double estimate_rho(const FusionState& state) {
  if (state.empty()) throw InvalidArgument("estimate_rho: empty variance history");
  const double hi = state.running_variance_max();
  if (hi == state.running_variance_min()) return 1.0;
  const double mean = state.running_variance_sum() / static_cast<double>(state.size());
  return std::max(1.0, hi / mean);
}

double dynamic_threshold(double lambda_base, double rho, Hypothesis predicted) {
  if (!(rho >= 1.0)) throw InvariantViolation("dynamic_threshold: rho must be >= 1");
  if (!(lambda_base > 0.0)) throw InvalidArgument("dynamic_threshold: lambda must be positive");
  return predicted == Hypothesis::h1 ? lambda_base / rho : rho * lambda_base;
}

AdaptiveDecision decide_proposed(FusionState& state, double e_comb, double sigma_mean_sq,
                                 double lambda_base, std::optional<double> rho_override) {
  if (state.size() + 1 < static_cast<std::size_t>(state.capacity()))
    throw WarmupIncomplete("decide_proposed: need " + std::to_string(state.capacity() - 1) +
                           " prior events, have " + std::to_string(state.size()));
  push_event(state, e_comb, sigma_mean_sq);

  AdaptiveDecision d;
  const auto prediction = predict_activity(state, lambda_base);
  d.e_avg = prediction.e_avg;
  d.predicted = prediction.predicted;
  d.rho = rho_override ? *rho_override : estimate_rho(state);
  d.lambda_base = lambda_base;
  d.lambda_new = dynamic_threshold(lambda_base, d.rho, d.predicted);
  d.decision = e_comb >= d.lambda_new ? Hypothesis::h1 : Hypothesis::h0;
  return d;
}

AdaptiveDecision decide_proposed(FusionState& state,
                                 std::span<const sensing::SensingReport> reports,
                                 CombinerKind kind, const fusion::FusionConfig& cfg,
                                 double lambda_base) {
  cfg.validate();
  const double e_comb = fusion::combine(kind, reports);
  return decide_proposed(state, e_comb, mean_variance(reports), lambda_base);
}

FusionCenter::FusionCenter(int history_len, double lambda_base, std::optional<double> rho_override)
    : state_(history_len), lambda_base_(lambda_base), rho_override_(rho_override) {
  if (!(lambda_base > 0.0)) throw InvalidArgument("FusionCenter: lambda must be positive");
  if (rho_override && !(*rho_override >= 1.0))
    throw InvariantViolation("FusionCenter: injected rho must be >= 1");
}

FusionCenter::Outcome FusionCenter::observe(double e_comb, double sigma_mean_sq) {
  Outcome out;
  if (state_.size() + 1 < static_cast<std::size_t>(state_.capacity())) {
    push_event(state_, e_comb, sigma_mean_sq);
    auto& d = out.decision;
    d.decision = fusion::decide_conventional(e_comb, lambda_base_);
    d.predicted = d.decision;
    d.e_avg = state_.running_energy_sum() / static_cast<double>(state_.size());
    d.lambda_base = lambda_base_;
    d.lambda_new = lambda_base_;
    out.warmup = true;
    return out;
  }
  out.decision = decide_proposed(state_, e_comb, sigma_mean_sq, lambda_base_, rho_override_);
  return out;
}

}  // namespace csslab::adaptive
