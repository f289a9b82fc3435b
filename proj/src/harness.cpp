#include "csslab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "csslab/adaptive.hpp"
#include "csslab/channel.hpp"
#include "csslab/errors.hpp"
#include "csslab/rng.hpp"
#include "csslab/sensing.hpp"

namespace csslab::harness {

namespace {

template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Produces (E_comb, sigma_mean^2) for successive events of one chain.
class EventSource {
 public:
  explicit EventSource(const Scenario& s)
      : s_(s),
        k_(static_cast<std::size_t>(s.num_crs)),
        n_(static_cast<std::size_t>(s.n_samples)),
        avg_snr_(s.avg_snr()),
        noise_{s.nominal_variance, s.uncertainty_db},
        channels_(k_),
        variances_(k_),
        reports_(k_),
        blocks_(k_) {}

  void start_chain(Rng& rng) {
    if (s_.fading_coherence == FadingCoherence::chain) draw_channels(rng);
  }

  std::pair<double, double> next(Hypothesis truth, Rng& rng) {
    if (s_.fading_coherence == FadingCoherence::event) draw_channels(rng);
    for (auto& v : variances_) v = channel::draw_noise_variance(noise_, rng);
    const double sigma_mean =
        std::accumulate(variances_.begin(), variances_.end(), 0.0) / static_cast<double>(k_);
    return {combined_energy(truth, rng), sigma_mean};
  }

 private:
  void draw_channels(Rng& rng) {
    if (s_.channel == ChannelKind::awgn) {
      std::fill(channels_.begin(), channels_.end(), channel::awgn_channel(avg_snr_, s_.nominal_variance));
      return;
    }
    if (s_.branch_fading == BranchFading::common) {
      std::fill(channels_.begin(), channels_.end(),
                channel::draw_channel(avg_snr_, rng, s_.nominal_variance));
      return;
    }
    for (auto& c : channels_) c = channel::draw_channel(avg_snr_, rng, s_.nominal_variance);
  }

  bool coherent_mrc() const {
    return s_.combiner == CombinerKind::mrc && s_.mrc_mode == MrcMode::coherent;
  }

  double combined_energy(Hypothesis truth, Rng& rng) {
    if (s_.fidelity == Fidelity::samples) {
      const auto pu = channel::gen_pu_samples(n_, rng);
      for (std::size_t j = 0; j < k_; ++j)
        blocks_[j] = channel::synthesize_received(truth, channels_[j], pu, variances_[j], rng);
      if (coherent_mrc()) return fusion::combine_coherent_mrc(blocks_);
      for (std::size_t j = 0; j < k_; ++j)
        reports_[j] = sensing::make_report(blocks_[j], static_cast<int>(j) + 1);
      return fusion::combine(s_.combiner, reports_);
    }
    if (coherent_mrc()) return fusion::draw_coherent_mrc_energy(truth, channels_, variances_, n_, rng);
    for (std::size_t j = 0; j < k_; ++j) {
      reports_[j] = sensing::SensingReport{
          sensing::draw_energy(truth, channels_[j], variances_[j], n_, rng), variances_[j],
          channels_[j].instantaneous_snr, static_cast<int>(j) + 1};
    }
    return fusion::combine(s_.combiner, reports_);
  }

  const Scenario& s_;
  std::size_t k_;
  std::size_t n_;
  double avg_snr_;
  channel::NoiseModel noise_;
  std::vector<channel::ChannelDraw> channels_;
  std::vector<double> variances_;
  std::vector<sensing::SensingReport> reports_;
  std::vector<channel::SampleBlock> blocks_;
};

struct ChainPlan {
  std::size_t chains = 0;
  std::int64_t per_chain = 0;
  std::int64_t total = 0;
  std::int64_t counted(std::size_t c) const {
    return std::min<std::int64_t>(per_chain, total - static_cast<std::int64_t>(c) * per_chain);
  }
};

ChainPlan plan_chains(const Scenario& s) {
  ChainPlan plan;
  plan.total = s.trials;
  plan.per_chain = s.chain_length;
  plan.chains = static_cast<std::size_t>((s.trials + s.chain_length - 1) / s.chain_length);
  return plan;
}

// Markov PU state: starts from the stationary 50/50 law, toggles w.p. 1/D.
class PuProcess {
 public:
  PuProcess(const PuModel& m, Hypothesis forced, Rng& rng) : model_(m), state_(forced) {
    if (m.kind == PuKind::markov)
      state_ = std::bernoulli_distribution(0.5)(rng) ? Hypothesis::h1 : Hypothesis::h0;
  }
  // Returns true when the state changed before this event.
  bool advance(Rng& rng, bool first) {
    if (model_.kind != PuKind::markov || first) return false;
    if (std::bernoulli_distribution(1.0 / model_.mean_dwell_events)(rng)) {
      state_ = state_ == Hypothesis::h1 ? Hypothesis::h0 : Hypothesis::h1;
      return true;
    }
    return false;
  }
  Hypothesis state() const { return state_; }

 private:
  PuModel model_;
  Hypothesis state_;
};

struct ChainTrace {
  std::vector<Hypothesis> truth;
  std::vector<bool> conventional;
  std::vector<bool> proposed;
  std::vector<std::int64_t> toggles;  // counted-event index of the first event after a change
};

PairedCounts run_chain(const Scenario& s, const PuModel& pu, Hypothesis forced, double lambda,
                       std::uint64_t chain_seed, std::int64_t counted, ChainTrace* trace) {
  Rng rng(chain_seed);
  EventSource source(s);
  source.start_chain(rng);
  PuProcess process(pu, forced, rng);
  adaptive::FusionCenter fc(s.history_len, lambda, s.rho_override);

  PairedCounts counts;
  const std::int64_t warmup = s.history_len - 1;
  for (std::int64_t i = 0; i < warmup + counted; ++i) {
    const bool toggled = process.advance(rng, i == 0);
    if (toggled && trace) trace->toggles.push_back(i - warmup);
    const auto [e, sigma_mean] = source.next(process.state(), rng);
    const auto out = fc.observe(e, sigma_mean);
    if (out.warmup) continue;
    const bool conv = fusion::decide_conventional(e, lambda) == Hypothesis::h1;
    const bool prop = out.decision.decision == Hypothesis::h1;
    ++counts.events;
    counts.conventional_positive += conv;
    counts.proposed_positive += prop;
    counts.disagreements += conv != prop;
    counts.rho_sum += out.decision.rho;
    if (trace) {
      trace->truth.push_back(process.state());
      trace->conventional.push_back(conv);
      trace->proposed.push_back(prop);
    }
  }
  return counts;
}

PairedCounts run_paired(const Scenario& s, const PuModel& pu, Hypothesis forced, double lambda,
                        std::uint64_t stream_seed, int threads) {
  s.validate();
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
  const auto plan = plan_chains(s);
  std::vector<PairedCounts> per_chain(plan.chains);
  parallel_for(plan.chains, threads, [&](std::size_t c) {
    per_chain[c] = run_chain(s, pu, forced, lambda, derive_seed(stream_seed, {c}), plan.counted(c),
                             nullptr);
  });
  PairedCounts total;
  for (const auto& c : per_chain) total += c;
  return total;
}

std::uint64_t regime_tag(Hypothesis h) { return h == Hypothesis::h1 ? 1 : 0; }

void annotate_small_trials(const Scenario& s) {
  if (s.trials < 100)
    warn("trials = " + std::to_string(s.trials) + " is too small for a meaningful binomial CI");
}

struct SweepRequest {
  bool conventional = true;
  bool proposed = true;
};

RocPair sweep(const Scenario& s, SweepRequest want, int threads) {
  s.validate();
  annotate_small_trials(s);
  const auto cfg = s.fusion_config();
  const auto tp = s.theory_params();
  const bool rayleigh = s.channel == ChannelKind::rayleigh;
  const double gamma_awgn = theory::awgn_gamma(tp);
  const PuModel h0{PuKind::forced_h0, 0.0};
  const PuModel h1{PuKind::forced_h1, 0.0};

  RocPair out;
  out.conventional.scheme = Scheme::conventional;
  out.proposed.scheme = Scheme::proposed;
  out.conventional.scenario = s;
  out.proposed.scenario = s;

  for (double target : s.pfa_grid) {
    const double lambda = fusion::cfar_threshold(cfg, target);
    const auto tag = seed_tag(target);
    const auto c0 = run_paired(s, h0, Hypothesis::h0, lambda,
                               derive_seed(s.seed, {tag, regime_tag(Hypothesis::h0)}), threads);
    const auto c1 = run_paired(s, h1, Hypothesis::h1, lambda,
                               derive_seed(s.seed, {tag, regime_tag(Hypothesis::h1)}), threads);

    auto fill = [&](Scheme scheme) {
      RocPoint p;
      p.target_pfa = target;
      p.lambda = lambda;
      p.trials = c0.events;
      p.empirical_pfa = c0.rate(scheme);
      p.empirical_pfa_ci = ci_halfwidth(p.empirical_pfa, c0.events);
      p.empirical_pd = c1.rate(scheme);
      p.empirical_pd_ci = ci_halfwidth(p.empirical_pd, c1.events);
      p.mean_rho_h0 = c0.mean_rho();
      p.mean_rho_h1 = c1.mean_rho();
      return p;
    };
    if (want.conventional) {
      auto p = fill(Scheme::conventional);
      p.theory_pfa = theory::qfa_approx(tp, lambda);
      p.theory_pd = rayleigh ? theory::qd_rayleigh(tp, lambda, theory::Form::exact)
                             : theory::qd_awgn_exact(tp, lambda, gamma_awgn);
      out.conventional.points.push_back(p);
    }
    if (want.proposed) {
      auto p = fill(Scheme::proposed);
      // Without an injected rho the formulas use the mean rho the simulation saw.
      const auto tp0 = tp.with_rho(s.rho_override.value_or(std::max(1.0, p.mean_rho_h0)));
      const auto tp1 = tp.with_rho(s.rho_override.value_or(std::max(1.0, p.mean_rho_h1)));
      p.theory_pfa = theory::qfa_proposed(tp0, lambda);
      p.theory_pd = rayleigh ? theory::qd_proposed_rayleigh(tp1, lambda)
                             : theory::qd_proposed_awgn(tp1, lambda, gamma_awgn);
      out.proposed.points.push_back(p);
    }
  }
  for (RocCurve* curve : {&out.conventional, &out.proposed}) {
    const auto a = roc_auc(curve->points);
    curve->auc = a.auc;
    curve->auc_se = a.se;
  }
  return out;
}

}  // namespace

std::vector<double> default_pfa_grid() {
  std::vector<double> grid(15);
  const double lo = std::log(0.01);
  const double hi = std::log(0.5);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1));
  grid.front() = 0.01;
  grid.back() = 0.5;
  return grid;
}

double Scenario::avg_snr() const { return std::pow(10.0, snr_db / 10.0); }

void Scenario::validate() const {
  auto fail = [](const std::string& field, const std::string& rule) {
    throw InvalidArgument(field + ": " + rule);
  };
  if (!std::isfinite(snr_db)) fail("snr_db", "must be finite");
  if (n_samples < 2 || n_samples % 2 != 0) fail("n_samples", "must be an even integer >= 2");
  if (num_crs < 1) fail("num_crs", "must be >= 1");
  if (history_len < 2) fail("history_len", "must be >= 2");
  if (!(uncertainty_db >= 0.0) || !std::isfinite(uncertainty_db))
    fail("uncertainty_db", "must be a finite value >= 0");
  if (trials < 1) fail("trials", "must be >= 1");
  if (pfa_grid.empty()) fail("pfa_grid", "must not be empty");
  for (std::size_t i = 0; i < pfa_grid.size(); ++i) {
    if (!(pfa_grid[i] > 0.0 && pfa_grid[i] < 1.0)) fail("pfa_grid", "values must lie in (0, 1)");
    if (i > 0 && !(pfa_grid[i] > pfa_grid[i - 1])) fail("pfa_grid", "must be strictly increasing");
  }
  if (pu_model.kind == PuKind::markov && !(pu_model.mean_dwell_events >= 10.0 * history_len))
    fail("pu_model", "markov mean dwell must be >= 10 * history_len");
  if (!(nominal_variance > 0.0) || !std::isfinite(nominal_variance))
    fail("nominal_variance", "must be positive");
  if (chain_length < 1) fail("chain_length", "must be >= 1");
  if (rho_override && !(*rho_override >= 1.0 && std::isfinite(*rho_override)))
    fail("rho_override", "must be >= 1");
  for (int l : sweep_l_values)
    if (l < 2) fail("sweep_l_values", "every L must be >= 2");
  for (int k : sweep_k_values)
    if (k < 1) fail("sweep_k_values", "every K must be >= 1");
  if (equivalence_k_range.empty()) fail("equivalence_k_range", "must not be empty");
  for (std::size_t i = 0; i < equivalence_k_range.size(); ++i) {
    if (equivalence_k_range[i] < 1) fail("equivalence_k_range", "every K must be >= 1");
    if (i > 0 && equivalence_k_range[i] <= equivalence_k_range[i - 1])
      fail("equivalence_k_range", "must be strictly ascending");
  }
  if (equivalence_k_proposed < 1) fail("equivalence_k_proposed", "must be >= 1");
}

fusion::FusionConfig Scenario::fusion_config() const {
  fusion::FusionConfig cfg;
  cfg.kind = combiner;
  cfg.num_crs = num_crs;
  cfg.n_samples = n_samples;
  cfg.nominal_variance = nominal_variance;
  cfg.sls_rule = sls_threshold;
  return cfg;
}

theory::TheoryParams Scenario::theory_params() const {
  theory::TheoryParams p;
  p.kind = combiner;
  p.num_crs = num_crs;
  p.n_samples = n_samples;
  p.noise_variance = nominal_variance;
  p.avg_snr = avg_snr();
  p.rho = rho_override.value_or(1.0);
  p.history_len = history_len;
  p.sls_branches = branch_fading == BranchFading::common ? theory::SlsBranches::common
                                                         : theory::SlsBranches::independent;
  p.window_model = window_model;
  return p;
}

double PairedCounts::rate(Scheme s) const {
  if (events == 0) return 0.0;
  const auto hits = s == Scheme::conventional ? conventional_positive : proposed_positive;
  return static_cast<double>(hits) / static_cast<double>(events);
}

PairedCounts& PairedCounts::operator+=(const PairedCounts& other) {
  events += other.events;
  conventional_positive += other.conventional_positive;
  proposed_positive += other.proposed_positive;
  disagreements += other.disagreements;
  rho_sum += other.rho_sum;
  return *this;
}

double ci_halfwidth(double rate, std::int64_t n) {
  if (n <= 0) return 0.0;
  return 3.0 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

PairedCounts simulate_paired(const Scenario& s, Hypothesis truth, double lambda,
                             std::uint64_t stream_seed, int threads) {
  const PuModel forced{truth == Hypothesis::h1 ? PuKind::forced_h1 : PuKind::forced_h0, 0.0};
  return run_paired(s, forced, truth, lambda, stream_seed, threads);
}

RegimeResult run_regime(const Scenario& s, Scheme scheme, double lambda, int threads) {
  s.validate();
  annotate_small_trials(s);
  const Hypothesis forced = s.pu_model.kind == PuKind::forced_h0 ? Hypothesis::h0 : Hypothesis::h1;
  const std::uint64_t regime = s.pu_model.kind == PuKind::markov ? 2 : regime_tag(forced);
  const auto counts =
      run_paired(s, s.pu_model, forced, lambda, derive_seed(s.seed, {seed_tag(lambda), regime}), threads);
  RegimeResult r;
  r.trials = counts.events;
  r.rate = counts.rate(scheme);
  r.ci_halfwidth = ci_halfwidth(r.rate, counts.events);
  return r;
}

AucEstimate roc_auc(const std::vector<RocPoint>& points) {
  std::vector<const RocPoint*> order;
  for (const auto& p : points) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(), [](const RocPoint* a, const RocPoint* b) {
    if (a->empirical_pfa != b->empirical_pfa) return a->empirical_pfa < b->empirical_pfa;
    return a->empirical_pd < b->empirical_pd;
  });
  std::vector<double> x{0.0}, y{0.0}, vx{0.0}, vy{0.0};
  for (const auto* p : order) {
    const double n = static_cast<double>(std::max<std::int64_t>(p->trials, 1));
    x.push_back(p->empirical_pfa);
    y.push_back(p->empirical_pd);
    vx.push_back(p->empirical_pfa * (1.0 - p->empirical_pfa) / n);
    vy.push_back(p->empirical_pd * (1.0 - p->empirical_pd) / n);
  }
  x.push_back(1.0);
  y.push_back(1.0);
  vx.push_back(0.0);
  vy.push_back(0.0);

  AucEstimate a;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) a.auc += (x[i + 1] - x[i]) * (y[i] + y[i + 1]) / 2.0;
  double var = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double dx = (y[i - 1] - y[i + 1]) / 2.0;
    const double dy = (x[i + 1] - x[i - 1]) / 2.0;
    var += dx * dx * vx[i] + dy * dy * vy[i];
  }
  a.se = std::sqrt(var);
  return a;
}

RocPair compare_sweep(const Scenario& s, int threads) { return sweep(s, {}, threads); }

RocCurve roc_sweep(const Scenario& s, Scheme scheme, int threads) {
  const bool conv = scheme == Scheme::conventional;
  auto pair = sweep(s, {conv, !conv}, threads);
  return conv ? pair.conventional : pair.proposed;
}

std::vector<RocCurve> sweep_param(const Scenario& base, SweepParam param,
                                  const std::vector<int>& values, int threads) {
  if (values.empty()) throw InvalidArgument("sweep_param: values must not be empty");
  std::vector<RocCurve> curves;
  for (int v : values) {
    Scenario s = base;
    if (param == SweepParam::history_len) {
      if (v < 2) throw InvalidArgument("sweep_param: history_len must be >= 2");
      s.history_len = v;
    } else {
      if (v < 1) throw InvalidArgument("sweep_param: num_crs must be >= 1");
      s.num_crs = v;
    }
    curves.push_back(roc_sweep(s, Scheme::proposed, threads));
  }
  return curves;
}

EquivalenceResult equivalence_search(const Scenario& s, int k_proposed,
                                     const std::vector<int>& k_range, int threads,
                                     double tolerance) {
  if (k_range.empty()) throw InvalidArgument("equivalence_search: K range must not be empty");
  for (std::size_t i = 0; i < k_range.size(); ++i) {
    if (k_range[i] < 1) throw InvalidArgument("equivalence_search: K must be >= 1");
    if (i > 0 && k_range[i] <= k_range[i - 1])
      throw InvalidArgument("equivalence_search: K range must be strictly ascending");
  }
  Scenario sp = s;
  sp.num_crs = k_proposed;
  const auto proposed = roc_sweep(sp, Scheme::proposed, threads);

  EquivalenceResult r;
  r.k_proposed = k_proposed;
  r.proposed_auc = proposed.auc;
  r.proposed_auc_se = proposed.auc_se;
  for (int k : k_range) {
    Scenario sc = s;
    sc.num_crs = k;
    const auto conv = roc_sweep(sc, Scheme::conventional, threads);
    r.k_values.push_back(k);
    r.conventional_auc.push_back(conv.auc);
    r.conventional_auc_se.push_back(conv.auc_se);
    r.auc_gap = proposed.auc - conv.auc;
    if (conv.auc >= proposed.auc - tolerance) {
      r.k_match = k;
      break;
    }
  }
  return r;
}

MarkovReport run_markov(const Scenario& s, double lambda, int threads) {
  s.validate();
  if (s.pu_model.kind != PuKind::markov) throw InvalidArgument("run_markov: pu_model must be markov");
  const auto plan = plan_chains(s);
  const auto stream = derive_seed(s.seed, {seed_tag(lambda), 2});
  std::vector<ChainTrace> traces(plan.chains);
  parallel_for(plan.chains, threads, [&](std::size_t c) {
    run_chain(s, s.pu_model, Hypothesis::h0, lambda, derive_seed(stream, {c}), plan.counted(c),
              &traces[c]);
  });

  MarkovReport report;
  struct Tally {
    std::int64_t fa_near = 0, fa_far = 0, md_near = 0, md_far = 0;
  } conv, prop;
  TransitionRates base;
  const std::int64_t radius = s.history_len;
  for (const auto& t : traces) {
    report.toggles += static_cast<std::int64_t>(t.toggles.size());
    const auto n = static_cast<std::int64_t>(t.truth.size());
    std::vector<bool> near(static_cast<std::size_t>(n), false);
    for (auto toggle : t.toggles)
      for (std::int64_t i = std::max<std::int64_t>(0, toggle - radius);
           i <= std::min(n - 1, toggle + radius); ++i)
        near[static_cast<std::size_t>(i)] = true;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      ++report.events;
      const bool is_near = near[idx];
      if (t.truth[idx] == Hypothesis::h0) {
        ++(is_near ? base.h0_near : base.h0_far);
        (is_near ? conv.fa_near : conv.fa_far) += t.conventional[idx];
        (is_near ? prop.fa_near : prop.fa_far) += t.proposed[idx];
      } else {
        ++(is_near ? base.h1_near : base.h1_far);
        (is_near ? conv.md_near : conv.md_far) += !t.conventional[idx];
        (is_near ? prop.md_near : prop.md_far) += !t.proposed[idx];
      }
    }
  }
  auto ratio = [](std::int64_t a, std::int64_t b) {
    return b > 0 ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  auto finish = [&](const Tally& tally) {
    TransitionRates r = base;
    r.pfa_near = ratio(tally.fa_near, base.h0_near);
    r.pfa_far = ratio(tally.fa_far, base.h0_far);
    r.pmd_near = ratio(tally.md_near, base.h1_near);
    r.pmd_far = ratio(tally.md_far, base.h1_far);
    return r;
  };
  report.conventional = finish(conv);
  report.proposed = finish(prop);
  return report;
}

std::string_view to_string(Scheme s) {
  return s == Scheme::conventional ? "conventional" : "proposed";
}
std::string_view to_string(ChannelKind c) { return c == ChannelKind::rayleigh ? "rayleigh" : "awgn"; }
std::string_view to_string(MrcMode m) {
  return m == MrcMode::coherent ? "coherent" : "energy_weighted";
}
std::string_view to_string(FadingCoherence f) {
  return f == FadingCoherence::event ? "event" : "chain";
}
std::string_view to_string(BranchFading b) {
  return b == BranchFading::independent ? "independent" : "common";
}
std::string_view to_string(Fidelity f) { return f == Fidelity::energy ? "energy" : "samples"; }

std::string to_string(const PuModel& m) {
  switch (m.kind) {
    case PuKind::forced_h0:
      return "forced_h0";
    case PuKind::forced_h1:
      return "forced_h1";
    case PuKind::markov: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "markov(%.12g)", m.mean_dwell_events);
      return buf;
    }
  }
  return "unknown";
}

}  // namespace csslab::harness
