#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "csslab/adaptive.hpp"
#include "csslab/cli.hpp"
#include "csslab/errors.hpp"
#include "csslab/fusion.hpp"
#include "csslab/harness.hpp"
#include "csslab/special.hpp"
#include "csslab/theory.hpp"

namespace py = pybind11;
using namespace csslab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cooperative spectrum-sensing simulator and detection theory";
  m.attr("__version__") = std::string(cli::kToolVersion);

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<WarmupIncomplete>(m, "WarmupIncomplete", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());

  py::enum_<Hypothesis>(m, "Hypothesis").value("h0", Hypothesis::h0).value("h1", Hypothesis::h1);
  py::enum_<CombinerKind>(m, "CombinerKind")
      .value("slc", CombinerKind::slc)
      .value("mrc", CombinerKind::mrc)
      .value("sls", CombinerKind::sls);

  // special functions
  m.def("q_func", &theory::q_func, py::arg("x"));
  m.def("inv_erfc", &theory::inv_erfc, py::arg("y"));
  m.def("q_inverse", &theory::q_inverse, py::arg("p"));
  m.def("upper_reg_gamma", &theory::upper_reg_gamma, py::arg("s"), py::arg("x"));
  m.def("marcum_q", &theory::marcum_q, py::arg("order"), py::arg("a"), py::arg("b"));

  // fusion
  py::enum_<fusion::SlsThresholdRule>(m, "SlsThresholdRule")
      .value("per_branch", fusion::SlsThresholdRule::per_branch)
      .value("exponent_k", fusion::SlsThresholdRule::exponent_k);
  py::class_<fusion::FusionConfig>(m, "FusionConfig")
      .def(py::init([](CombinerKind kind, int num_crs, int n_samples, double nominal_variance,
                       fusion::SlsThresholdRule rule) {
             fusion::FusionConfig c{kind, num_crs, n_samples, nominal_variance, rule};
             c.validate();
             return c;
           }),
           py::arg("kind") = CombinerKind::slc, py::arg("num_crs") = 7, py::arg("n_samples") = 1000,
           py::arg("nominal_variance") = 1.0, py::arg("sls_rule") = fusion::SlsThresholdRule::per_branch)
      .def_readwrite("kind", &fusion::FusionConfig::kind)
      .def_readwrite("num_crs", &fusion::FusionConfig::num_crs)
      .def_readwrite("n_samples", &fusion::FusionConfig::n_samples)
      .def_readwrite("nominal_variance", &fusion::FusionConfig::nominal_variance)
      .def_readwrite("sls_rule", &fusion::FusionConfig::sls_rule);
  py::class_<sensing::SensingReport>(m, "SensingReport")
      .def(py::init([](double energy, double est_noise_variance, double instantaneous_snr, int cr_index) {
             return sensing::SensingReport{energy, est_noise_variance, instantaneous_snr, cr_index};
           }),
           py::arg("energy"), py::arg("est_noise_variance") = 1.0, py::arg("instantaneous_snr") = 0.0,
           py::arg("cr_index") = 1)
      .def_readwrite("energy", &sensing::SensingReport::energy)
      .def_readwrite("est_noise_variance", &sensing::SensingReport::est_noise_variance)
      .def_readwrite("instantaneous_snr", &sensing::SensingReport::instantaneous_snr)
      .def_readwrite("cr_index", &sensing::SensingReport::cr_index);
  m.def("cfar_threshold", &fusion::cfar_threshold, py::arg("config"), py::arg("target_pfa"));
  m.def("mrc_weights", [](const std::vector<double>& snrs) { return fusion::mrc_weights(snrs); },
        py::arg("snrs"));
  m.def("combine",
        [](CombinerKind kind, const std::vector<sensing::SensingReport>& reports) {
          return fusion::combine(kind, reports);
        },
        py::arg("kind"), py::arg("reports"));

  // adaptive
  py::class_<adaptive::AdaptiveDecision>(m, "AdaptiveDecision")
      .def_readonly("decision", &adaptive::AdaptiveDecision::decision)
      .def_readonly("predicted", &adaptive::AdaptiveDecision::predicted)
      .def_readonly("e_avg", &adaptive::AdaptiveDecision::e_avg)
      .def_readonly("rho", &adaptive::AdaptiveDecision::rho)
      .def_readonly("lambda_base", &adaptive::AdaptiveDecision::lambda_base)
      .def_readonly("lambda_new", &adaptive::AdaptiveDecision::lambda_new);
  py::class_<adaptive::FusionState>(m, "FusionState")
      .def(py::init<int>(), py::arg("capacity"))
      .def("push", &adaptive::FusionState::push, py::arg("e_comb"), py::arg("sigma_mean_sq"))
      .def("clear", &adaptive::FusionState::clear)
      .def_property_readonly("capacity", &adaptive::FusionState::capacity)
      .def_property_readonly("full", &adaptive::FusionState::full)
      .def("__len__", &adaptive::FusionState::size)
      .def_property_readonly("running_energy_sum", &adaptive::FusionState::running_energy_sum)
      .def_property_readonly("running_variance_sum", &adaptive::FusionState::running_variance_sum)
      .def_property_readonly("running_variance_max", &adaptive::FusionState::running_variance_max);
  m.def("estimate_rho", &adaptive::estimate_rho, py::arg("state"));
  m.def("dynamic_threshold", &adaptive::dynamic_threshold, py::arg("lambda_base"), py::arg("rho"),
        py::arg("predicted"));
  m.def("decide_proposed",
        [](adaptive::FusionState& state, double e_comb, double sigma_mean_sq, double lambda_base,
           std::optional<double> rho) {
          return adaptive::decide_proposed(state, e_comb, sigma_mean_sq, lambda_base, rho);
        },
        py::arg("state"), py::arg("e_comb"), py::arg("sigma_mean_sq"), py::arg("lambda_base"),
        py::arg("rho_override") = py::none());

  // theory
  py::enum_<theory::SlsBranches>(m, "SlsBranches")
      .value("independent", theory::SlsBranches::independent)
      .value("common", theory::SlsBranches::common);
  py::enum_<theory::WindowModel>(m, "WindowModel")
      .value("gaussian", theory::WindowModel::gaussian)
      .value("exact", theory::WindowModel::exact);
  py::enum_<theory::Form>(m, "Form").value("exact", theory::Form::exact).value("approx", theory::Form::approx);
  py::class_<theory::TheoryParams>(m, "TheoryParams")
      .def(py::init([](CombinerKind kind, int num_crs, int n_samples, double noise_variance,
                       double avg_snr, double rho, int history_len, int window_h1_events,
                       theory::SlsBranches sls_branches, theory::WindowModel window_model) {
             theory::TheoryParams p{kind,        num_crs,          n_samples,   noise_variance,
                                    avg_snr,     rho,              history_len, window_h1_events,
                                    sls_branches, window_model};
             p.validate();
             return p;
           }),
           py::arg("kind") = CombinerKind::slc, py::arg("num_crs") = 7, py::arg("n_samples") = 1000,
           py::arg("noise_variance") = 1.0, py::arg("avg_snr") = 0.0316227766016838,
           py::arg("rho") = 1.0, py::arg("history_len") = 15, py::arg("window_h1_events") = -1,
           py::arg("sls_branches") = theory::SlsBranches::independent,
           py::arg("window_model") = theory::WindowModel::gaussian)
      .def_readwrite("kind", &theory::TheoryParams::kind)
      .def_readwrite("num_crs", &theory::TheoryParams::num_crs)
      .def_readwrite("n_samples", &theory::TheoryParams::n_samples)
      .def_readwrite("noise_variance", &theory::TheoryParams::noise_variance)
      .def_readwrite("avg_snr", &theory::TheoryParams::avg_snr)
      .def_readwrite("rho", &theory::TheoryParams::rho)
      .def_readwrite("history_len", &theory::TheoryParams::history_len)
      .def_readwrite("window_h1_events", &theory::TheoryParams::window_h1_events)
      .def_readwrite("sls_branches", &theory::TheoryParams::sls_branches)
      .def_readwrite("window_model", &theory::TheoryParams::window_model);
  m.def("qfa_exact", &theory::qfa_exact, py::arg("params"), py::arg("lam"));
  m.def("qfa_approx", &theory::qfa_approx, py::arg("params"), py::arg("lam"));
  m.def("qd_awgn_exact", &theory::qd_awgn_exact, py::arg("params"), py::arg("lam"), py::arg("gamma"));
  m.def("qd_awgn_approx", &theory::qd_awgn_approx, py::arg("params"), py::arg("lam"), py::arg("gamma"));
  m.def("qd_rayleigh", &theory::qd_rayleigh, py::arg("params"), py::arg("lam"),
        py::arg("form") = theory::Form::exact);
  m.def("avg_stats",
        [](const theory::TheoryParams& p, double gamma) {
          const auto s = theory::avg_stats(p, gamma);
          return py::make_tuple(s.mean, s.variance);
        },
        py::arg("params"), py::arg("gamma"));
  m.def("predictor_prob", &theory::predictor_prob, py::arg("params"), py::arg("lam"), py::arg("gamma"));
  m.def("qfa_proposed", &theory::qfa_proposed, py::arg("params"), py::arg("lam"), py::arg("gamma") = 0.0);
  m.def("qd_proposed_awgn", &theory::qd_proposed_awgn, py::arg("params"), py::arg("lam"),
        py::arg("gamma"));
  m.def("qd_proposed_rayleigh", &theory::qd_proposed_rayleigh, py::arg("params"), py::arg("lam"));

  // harness
  py::enum_<harness::Scheme>(m, "Scheme")
      .value("conventional", harness::Scheme::conventional)
      .value("proposed", harness::Scheme::proposed);
  py::class_<harness::Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("snr_db", &harness::Scenario::snr_db)
      .def_readwrite("n_samples", &harness::Scenario::n_samples)
      .def_readwrite("num_crs", &harness::Scenario::num_crs)
      .def_readwrite("history_len", &harness::Scenario::history_len)
      .def_readwrite("uncertainty_db", &harness::Scenario::uncertainty_db)
      .def_readwrite("combiner", &harness::Scenario::combiner)
      .def_readwrite("trials", &harness::Scenario::trials)
      .def_readwrite("seed", &harness::Scenario::seed)
      .def_readwrite("pfa_grid", &harness::Scenario::pfa_grid)
      .def_readwrite("rho_override", &harness::Scenario::rho_override)
      .def_readwrite("chain_length", &harness::Scenario::chain_length)
      .def("validate", &harness::Scenario::validate)
      .def("theory_params", &harness::Scenario::theory_params)
      .def("fusion_config", &harness::Scenario::fusion_config)
      .def("__repr__", [](const harness::Scenario& s) { return "<Scenario\n" + cli::canonical_text(s) + ">"; });
  py::class_<harness::RocPoint>(m, "RocPoint")
      .def_readonly("target_pfa", &harness::RocPoint::target_pfa)
      .def_readonly("lam", &harness::RocPoint::lambda)
      .def_readonly("empirical_pfa", &harness::RocPoint::empirical_pfa)
      .def_readonly("empirical_pfa_ci", &harness::RocPoint::empirical_pfa_ci)
      .def_readonly("empirical_pd", &harness::RocPoint::empirical_pd)
      .def_readonly("empirical_pd_ci", &harness::RocPoint::empirical_pd_ci)
      .def_readonly("theory_pfa", &harness::RocPoint::theory_pfa)
      .def_readonly("theory_pd", &harness::RocPoint::theory_pd)
      .def_readonly("trials", &harness::RocPoint::trials);
  py::class_<harness::RocCurve>(m, "RocCurve")
      .def_readonly("scheme", &harness::RocCurve::scheme)
      .def_readonly("scenario", &harness::RocCurve::scenario)
      .def_readonly("points", &harness::RocCurve::points)
      .def_readonly("auc", &harness::RocCurve::auc)
      .def_readonly("auc_se", &harness::RocCurve::auc_se);
  py::class_<harness::EquivalenceResult>(m, "EquivalenceResult")
      .def_readonly("k_proposed", &harness::EquivalenceResult::k_proposed)
      .def_readonly("proposed_auc", &harness::EquivalenceResult::proposed_auc)
      .def_readonly("k_match", &harness::EquivalenceResult::k_match)
      .def_readonly("auc_gap", &harness::EquivalenceResult::auc_gap)
      .def_readonly("k_values", &harness::EquivalenceResult::k_values)
      .def_readonly("conventional_auc", &harness::EquivalenceResult::conventional_auc);

  m.def("run_regime",
        [](const harness::Scenario& s, harness::Scheme scheme, double lam, int threads) {
          py::gil_scoped_release release;
          const auto r = harness::run_regime(s, scheme, lam, threads);
          return py::make_tuple(r.rate, r.ci_halfwidth);
        },
        py::arg("scenario"), py::arg("scheme"), py::arg("lam"), py::arg("threads") = 1);
  m.def("roc_sweep",
        [](const harness::Scenario& s, harness::Scheme scheme, int threads) {
          py::gil_scoped_release release;
          return harness::roc_sweep(s, scheme, threads);
        },
        py::arg("scenario"), py::arg("scheme"), py::arg("threads") = 1);
  m.def("compare_sweep",
        [](const harness::Scenario& s, int threads) {
          py::gil_scoped_release release;
          const auto r = harness::compare_sweep(s, threads);
          return py::make_tuple(r.conventional, r.proposed);
        },
        py::arg("scenario"), py::arg("threads") = 1);
  m.def("equivalence_search",
        [](const harness::Scenario& s, int k_proposed, const std::vector<int>& k_range, int threads) {
          py::gil_scoped_release release;
          return harness::equivalence_search(s, k_proposed, k_range, threads);
        },
        py::arg("scenario"), py::arg("k_proposed"), py::arg("k_range"), py::arg("threads") = 1);

  // scenario files and artifacts
  m.def("parse_scenario_text", &cli::parse_scenario_text, py::arg("text"),
        py::arg("overrides") = std::vector<std::string>{});
  m.def("canonical_text", &cli::canonical_text, py::arg("scenario"));
  m.def("scenario_digest", &cli::scenario_digest, py::arg("scenario"));
  m.def("run_command",
        [](const std::string& subcommand, const harness::Scenario& s, const std::filesystem::path& out,
           int threads) {
          cli::RunManifest r;
          {
            py::gil_scoped_release release;
            r = cli::run_command(subcommand, s, out, threads);
          }
          py::dict d;
          d["tool_version"] = r.tool_version;
          d["scenario_digest"] = r.scenario_digest;
          d["started_at"] = r.started_at;
          d["outputs"] = r.outputs;
          return d;
        },
        py::arg("subcommand"), py::arg("scenario"), py::arg("out_dir"), py::arg("threads") = 1);
}
