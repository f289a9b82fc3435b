#include "csslab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

#include "csslab/errors.hpp"

namespace csslab::cli {

namespace fs = std::filesystem;
using harness::Scenario;
using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& want) {
  throw InvalidArgument(key + ": cannot parse '" + value + "' as " + want);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, v, "an integer");
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) parts.push_back(t);
  }
  return parts;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& p : split_list(v)) out.push_back(parse_double(key, p));
  if (out.empty()) bad_value(key, v, "a comma-separated list of numbers");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& p : split_list(v)) out.push_back(parse_int<int>(key, p));
  if (out.empty()) bad_value(key, v, "a comma-separated list of integers");
  return out;
}

template <class Enum>
Enum parse_enum(const std::string& key, const std::string& v,
                std::initializer_list<std::pair<std::string_view, Enum>> options) {
  const auto needle = lower(v);
  std::string names;
  for (const auto& [name, value] : options) {
    if (needle == name) return value;
    names += (names.empty() ? "" : " | ") + std::string(name);
  }
  bad_value(key, v, "one of " + names);
}

harness::PuModel parse_pu_model(const std::string& key, const std::string& v) {
  const auto t = lower(v);
  if (t == "forced_h0") return {harness::PuKind::forced_h0, 0.0};
  if (t == "forced_h1") return {harness::PuKind::forced_h1, 0.0};
  if (t.starts_with("markov(") && t.ends_with(")"))
    return {harness::PuKind::markov, parse_double(key, trim(t.substr(7, t.size() - 8)))};
  bad_value(key, v, "forced_h0 | forced_h1 | markov(<mean dwell events>)");
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

struct Field {
  std::string_view key;
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

const std::vector<Field>& fields() {
  using harness::BranchFading;
  using harness::ChannelKind;
  using harness::FadingCoherence;
  using harness::Fidelity;
  using harness::MrcMode;
  static const std::vector<Field> table = {
      {"snr_db", [](Scenario& s, const std::string& v) { s.snr_db = parse_double("snr_db", v); },
       [](const Scenario& s) { return format_number(s.snr_db); }},
      {"n_samples", [](Scenario& s, const std::string& v) { s.n_samples = parse_int<int>("n_samples", v); },
       [](const Scenario& s) { return std::to_string(s.n_samples); }},
      {"num_crs", [](Scenario& s, const std::string& v) { s.num_crs = parse_int<int>("num_crs", v); },
       [](const Scenario& s) { return std::to_string(s.num_crs); }},
      {"history_len",
       [](Scenario& s, const std::string& v) { s.history_len = parse_int<int>("history_len", v); },
       [](const Scenario& s) { return std::to_string(s.history_len); }},
      {"uncertainty_db",
       [](Scenario& s, const std::string& v) { s.uncertainty_db = parse_double("uncertainty_db", v); },
       [](const Scenario& s) { return format_number(s.uncertainty_db); }},
      {"combiner",
       [](Scenario& s, const std::string& v) {
         s.combiner = parse_enum<CombinerKind>("combiner", v,
                                               {{"slc", CombinerKind::slc},
                                                {"mrc", CombinerKind::mrc},
                                                {"sls", CombinerKind::sls}});
       },
       [](const Scenario& s) { return lower(std::string(to_string(s.combiner))); }},
      {"trials",
       [](Scenario& s, const std::string& v) { s.trials = parse_int<std::int64_t>("trials", v); },
       [](const Scenario& s) { return std::to_string(s.trials); }},
      {"seed", [](Scenario& s, const std::string& v) { s.seed = parse_int<std::uint64_t>("seed", v); },
       [](const Scenario& s) { return std::to_string(s.seed); }},
      {"pfa_grid",
       [](Scenario& s, const std::string& v) { s.pfa_grid = parse_double_list("pfa_grid", v); },
       [](const Scenario& s) { return join_numbers(s.pfa_grid); }},
      {"channel",
       [](Scenario& s, const std::string& v) {
         s.channel = parse_enum<ChannelKind>("channel", v,
                                             {{"rayleigh", ChannelKind::rayleigh},
                                              {"awgn", ChannelKind::awgn}});
       },
       [](const Scenario& s) { return std::string(harness::to_string(s.channel)); }},
      {"pu_model", [](Scenario& s, const std::string& v) { s.pu_model = parse_pu_model("pu_model", v); },
       [](const Scenario& s) { return harness::to_string(s.pu_model); }},
      {"nominal_variance",
       [](Scenario& s, const std::string& v) {
         s.nominal_variance = parse_double("nominal_variance", v);
       },
       [](const Scenario& s) { return format_number(s.nominal_variance); }},
      {"mrc_mode",
       [](Scenario& s, const std::string& v) {
         s.mrc_mode = parse_enum<MrcMode>("mrc_mode", v,
                                          {{"coherent", MrcMode::coherent},
                                           {"energy_weighted", MrcMode::energy_weighted}});
       },
       [](const Scenario& s) { return std::string(harness::to_string(s.mrc_mode)); }},
      {"fading_coherence",
       [](Scenario& s, const std::string& v) {
         s.fading_coherence = parse_enum<FadingCoherence>(
             "fading_coherence", v, {{"event", FadingCoherence::event}, {"chain", FadingCoherence::chain}});
       },
       [](const Scenario& s) { return std::string(harness::to_string(s.fading_coherence)); }},
      {"branch_fading",
       [](Scenario& s, const std::string& v) {
         s.branch_fading = parse_enum<BranchFading>(
             "branch_fading", v,
             {{"independent", BranchFading::independent}, {"common", BranchFading::common}});
       },
       [](const Scenario& s) { return std::string(harness::to_string(s.branch_fading)); }},
      {"chain_length",
       [](Scenario& s, const std::string& v) { s.chain_length = parse_int<int>("chain_length", v); },
       [](const Scenario& s) { return std::to_string(s.chain_length); }},
      {"rho_override",
       [](Scenario& s, const std::string& v) {
         if (lower(v) == "none")
           s.rho_override.reset();
         else
           s.rho_override = parse_double("rho_override", v);
       },
       [](const Scenario& s) {
         return s.rho_override ? format_number(*s.rho_override) : std::string("none");
       }},
      {"sls_threshold",
       [](Scenario& s, const std::string& v) {
         s.sls_threshold = parse_enum<fusion::SlsThresholdRule>(
             "sls_threshold", v,
             {{"per_branch", fusion::SlsThresholdRule::per_branch},
              {"exponent_k", fusion::SlsThresholdRule::exponent_k}});
       },
       [](const Scenario& s) {
         return std::string(s.sls_threshold == fusion::SlsThresholdRule::per_branch ? "per_branch"
                                                                                   : "exponent_k");
       }},
      {"fidelity",
       [](Scenario& s, const std::string& v) {
         s.fidelity = parse_enum<Fidelity>("fidelity", v,
                                           {{"energy", Fidelity::energy}, {"samples", Fidelity::samples}});
       },
       [](const Scenario& s) { return std::string(harness::to_string(s.fidelity)); }},
      {"window_model",
       [](Scenario& s, const std::string& v) {
         s.window_model = parse_enum<theory::WindowModel>(
             "window_model", v,
             {{"gaussian", theory::WindowModel::gaussian}, {"exact", theory::WindowModel::exact}});
       },
       [](const Scenario& s) {
         return std::string(s.window_model == theory::WindowModel::gaussian ? "gaussian" : "exact");
       }},
      {"sweep_l_values",
       [](Scenario& s, const std::string& v) { s.sweep_l_values = parse_int_list("sweep_l_values", v); },
       [](const Scenario& s) { return join_ints(s.sweep_l_values); }},
      {"sweep_k_values",
       [](Scenario& s, const std::string& v) { s.sweep_k_values = parse_int_list("sweep_k_values", v); },
       [](const Scenario& s) { return join_ints(s.sweep_k_values); }},
      {"equivalence_k_range",
       [](Scenario& s, const std::string& v) {
         s.equivalence_k_range = parse_int_list("equivalence_k_range", v);
       },
       [](const Scenario& s) { return join_ints(s.equivalence_k_range); }},
      {"equivalence_k_proposed",
       [](Scenario& s, const std::string& v) {
         s.equivalence_k_proposed = parse_int<int>("equivalence_k_proposed", v);
       },
       [](const Scenario& s) { return std::to_string(s.equivalence_k_proposed); }},
  };
  return table;
}

void apply(Scenario& s, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(s, value);
      return;
    }
  }
  std::string keys;
  for (const auto& k : valid_keys()) keys += (keys.empty() ? "" : ", ") + k;
  throw InvalidArgument("unknown key '" + key + "'; valid keys: " + keys);
}

std::pair<std::string, std::string> split_assignment(std::string_view text, const std::string& where) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos)
    throw InvalidArgument(where + ": expected 'key = value', got '" + std::string(text) + "'");
  auto key = lower(trim(text.substr(0, eq)));
  auto value = trim(text.substr(eq + 1));
  if (key.empty()) throw InvalidArgument(where + ": missing key");
  if (value.empty()) throw InvalidArgument(where + ": missing value for '" + key + "'");
  return {key, value};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw InvalidArgument("out: cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const { return written_; }
  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

constexpr std::string_view kCsvHeader =
    "scenario_digest,combiner,scheme,target_pfa,lambda,empirical_pfa,empirical_pfa_ci,"
    "empirical_pd,empirical_pd_ci,theory_pfa,theory_pd,trials,seed\n";

// Collects CSV rows, AUC rows and the digest -> scenario map for the manifest.
class Report {
 public:
  void add(const harness::RocCurve& c) {
    const auto digest = scenario_digest(c.scenario);
    scenarios_[digest] = c.scenario;
    const auto comb = lower(std::string(to_string(c.scenario.combiner)));
    const auto scheme = std::string(harness::to_string(c.scheme));
    for (const auto& p : c.points) {
      rows_ += digest + ',' + comb + ',' + scheme + ',' + format_number(p.target_pfa) + ',' +
               format_number(p.lambda) + ',' + format_number(p.empirical_pfa) + ',' +
               format_number(p.empirical_pfa_ci) + ',' + format_number(p.empirical_pd) + ',' +
               format_number(p.empirical_pd_ci) + ',' + format_number(p.theory_pfa) + ',' +
               format_number(p.theory_pd) + ',' + std::to_string(p.trials) + ',' +
               std::to_string(c.scenario.seed) + '\n';
    }
    auc_ += digest + ',' + comb + ',' + scheme + ',' + std::to_string(c.scenario.num_crs) + ',' +
            std::to_string(c.scenario.history_len) + ',' + format_number(c.auc) + ',' +
            format_number(c.auc_se) + '\n';
  }

  void note_scenario(const Scenario& s) { scenarios_[scenario_digest(s)] = s; }

  std::string csv() const { return std::string(kCsvHeader) + rows_; }
  std::string auc_csv() const {
    return "scenario_digest,combiner,scheme,num_crs,history_len,auc,auc_se\n" + auc_;
  }
  json scenario_map() const {
    json out = json::object();
    for (const auto& [digest, s] : scenarios_) {
      json fields_json = json::object();
      for (const auto& f : fields()) fields_json[std::string(f.key)] = f.get(s);
      out[digest] = fields_json;
    }
    return out;
  }

 private:
  std::string rows_;
  std::string auc_;
  std::map<std::string, Scenario> scenarios_;
};

std::string plot_script(const std::string& csv_name) {
  return R"(#!/usr/bin/env python3
"""Plot ROC curves from the css-lab CSV next to this script."""
import csv
import pathlib
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
source = here / ")" + csv_name + R"("
curves = defaultdict(list)
with source.open() as fh:
    for row in csv.DictReader(fh):
        key = (row["scenario_digest"][:8], row["combiner"], row["scheme"])
        curves[key].append(row)

fig, ax = plt.subplots(figsize=(7, 5))
for (digest, combiner, scheme), rows in sorted(curves.items()):
    rows.sort(key=lambda r: float(r["empirical_pfa"]))
    pfa = [float(r["empirical_pfa"]) for r in rows]
    pd = [float(r["empirical_pd"]) for r in rows]
    style = "-" if scheme == "proposed" else "--"
    line, = ax.plot(pfa, pd, style, marker="o", ms=3, label=f"{combiner} {scheme} [{digest}]")
    th = sorted((float(r["theory_pfa"]), float(r["theory_pd"])) for r in rows)
    ax.plot([t[0] for t in th], [t[1] for t in th], ":", color=line.get_color(), lw=1)

ax.set_xlabel("P_fa")
ax.set_ylabel("P_d")
ax.set_xlim(0, 1)
ax.set_ylim(0, 1.02)
ax.grid(alpha=0.3)
ax.legend(fontsize=7)
out = here / (sys.argv[1] if len(sys.argv) > 1 else "roc.png")
fig.savefig(out, dpi=150, bbox_inches="tight")
print(out)
)";
}

std::string theory_table(const Scenario& base) {
  std::string out =
      "combiner,target_pfa,lambda,rho,qfa_exact,qfa_approx,qd_awgn_exact,qd_awgn_approx,"
      "qd_rayleigh,qfa_proposed,qd_proposed_awgn,qd_proposed_rayleigh\n";
  for (auto kind : kAllCombiners) {
    Scenario s = base;
    s.combiner = kind;
    const auto cfg = s.fusion_config();
    const auto tp = s.theory_params();
    const double g = theory::awgn_gamma(tp);
    for (double target : s.pfa_grid) {
      const double lambda = fusion::cfar_threshold(cfg, target);
      const double values[] = {theory::qfa_exact(tp, lambda),
                               theory::qfa_approx(tp, lambda),
                               theory::qd_awgn_exact(tp, lambda, g),
                               theory::qd_awgn_approx(tp, lambda, g),
                               theory::qd_rayleigh(tp, lambda),
                               theory::qfa_proposed(tp, lambda),
                               theory::qd_proposed_awgn(tp, lambda, g),
                               theory::qd_proposed_rayleigh(tp, lambda)};
      out += lower(std::string(to_string(kind))) + ',' + format_number(target) + ',' +
             format_number(lambda) + ',' + format_number(tp.rho);
      for (double v : values) out += ',' + format_number(v);
      out += '\n';
    }
  }
  return out;
}

json equivalence_json(const harness::EquivalenceResult& r, const std::string& digest) {
  json j;
  j["scenario_digest"] = digest;
  j["k_proposed"] = r.k_proposed;
  j["proposed_auc"] = format_number(r.proposed_auc);
  j["proposed_auc_se"] = format_number(r.proposed_auc_se);
  j["k_match"] = r.k_match;
  j["auc_gap"] = format_number(r.auc_gap);
  json scan = json::array();
  for (std::size_t i = 0; i < r.k_values.size(); ++i)
    scan.push_back({{"k", r.k_values[i]},
                    {"conventional_auc", format_number(r.conventional_auc[i])},
                    {"conventional_auc_se", format_number(r.conventional_auc_se[i])}});
  j["scan"] = scan;
  return j;
}

json markov_json(const Scenario& s, int threads) {
  json out = json::array();
  const auto cfg = s.fusion_config();
  for (double target : s.pfa_grid) {
    const double lambda = fusion::cfar_threshold(cfg, target);
    const auto r = harness::run_markov(s, lambda, threads);
    auto rates = [](const harness::TransitionRates& t) {
      return json{{"pfa_near", format_number(t.pfa_near)},   {"pfa_far", format_number(t.pfa_far)},
                  {"pmd_near", format_number(t.pmd_near)},   {"pmd_far", format_number(t.pmd_far)},
                  {"excess_pfa", format_number(t.excess_pfa())},
                  {"excess_pmd", format_number(t.excess_pmd())}};
    };
    out.push_back({{"target_pfa", format_number(target)},
                   {"lambda", format_number(lambda)},
                   {"events", r.events},
                   {"toggles", r.toggles},
                   {"conventional", rates(r.conventional)},
                   {"proposed", rates(r.proposed)}});
  }
  return out;
}

}  // namespace

std::vector<std::string> valid_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

Scenario parse_scenario_text(std::string_view text, const std::vector<std::string>& overrides) {
  Scenario s;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    auto [key, value] = split_assignment(body, where);
    if (auto it = seen.find(key); it != seen.end())
      throw InvalidArgument(where + ": duplicate key '" + key + "' (first set on line " +
                            std::to_string(it->second) + ")");
    seen[key] = line_no;
    apply(s, key, value);
  }
  for (const auto& o : overrides) {
    auto [key, value] = split_assignment(o, "--set");
    apply(s, key, value);
  }
  s.validate();
  return s;
}

Scenario parse_scenario(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("scenario: cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), overrides);
}

std::string canonical_text(const Scenario& s) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(s) + '\n';
  return out;
}

std::string scenario_digest(const Scenario& s) {
  const auto text = canonical_text(s);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("scenario_digest: SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  // printf honours LC_NUMERIC; force the decimal point.
  for (char* c = buf; *c; ++c)
    if (*c == ',') *c = '.';
  return buf;
}

std::vector<std::string> subcommands() {
  return {"roc", "sweep-l", "sweep-k", "compare", "equivalence", "theory-table"};
}

RunManifest run_command(std::string_view subcommand, const Scenario& s, const fs::path& out_dir,
                        int threads) {
  s.validate();
  RunManifest m;
  m.tool_version = std::string(kToolVersion);
  m.scenario_digest = scenario_digest(s);
  m.started_at = utc_timestamp();

  OutputDir out(out_dir);
  Report report;
  report.note_scenario(s);
  json extra = json::object();

  auto write_curves = [&](const std::string& stem) {
    out.write(stem + ".csv", report.csv());
    out.write("auc.csv", report.auc_csv());
    out.write("plot_roc.py", plot_script(stem + ".csv"));
  };

  if (subcommand == "roc") {
    const auto pair = harness::compare_sweep(s, threads);
    report.add(pair.conventional);
    report.add(pair.proposed);
    write_curves("roc");
    if (s.pu_model.kind == harness::PuKind::markov)
      out.write("markov.json", markov_json(s, threads).dump(2) + "\n");
  } else if (subcommand == "compare") {
    for (auto kind : kAllCombiners) {
      Scenario sc = s;
      sc.combiner = kind;
      const auto pair = harness::compare_sweep(sc, threads);
      report.add(pair.conventional);
      report.add(pair.proposed);
    }
    write_curves("compare");
  } else if (subcommand == "sweep-l" || subcommand == "sweep-k") {
    const bool by_l = subcommand == "sweep-l";
    const auto curves = harness::sweep_param(
        s, by_l ? harness::SweepParam::history_len : harness::SweepParam::num_crs,
        by_l ? s.sweep_l_values : s.sweep_k_values, threads);
    for (const auto& c : curves) report.add(c);
    write_curves(by_l ? "sweep_l" : "sweep_k");
  } else if (subcommand == "equivalence") {
    const auto r =
        harness::equivalence_search(s, s.equivalence_k_proposed, s.equivalence_k_range, threads);
    out.write("equivalence.json", equivalence_json(r, m.scenario_digest).dump(2) + "\n");
  } else if (subcommand == "theory-table") {
    out.write("theory_table.csv", theory_table(s));
  } else {
    std::string names;
    for (const auto& n : subcommands()) names += (names.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown subcommand '" + std::string(subcommand) + "'; expected one of " + names);
  }

  m.outputs = out.written();
  m.outputs.push_back("manifest.json");
  json manifest;
  manifest["tool_version"] = m.tool_version;
  manifest["subcommand"] = std::string(subcommand);
  manifest["scenario_digest"] = m.scenario_digest;
  manifest["started_at"] = m.started_at;
  manifest["outputs"] = m.outputs;
  manifest["scenarios"] = report.scenario_map();
  out.write("manifest.json", manifest.dump(2) + "\n");
  return m;
}

int report_failure(const std::exception& e, const fs::path& out_dir) {
  int code = 1;
  std::string kind = "runtime_error";
  if (dynamic_cast<const InvalidArgument*>(&e)) {
    code = kExitValidation;
    kind = "validation_error";
  } else if (dynamic_cast<const NumericError*>(&e)) {
    code = kExitNumeric;
    kind = "numeric_error";
  }
  json record{{"error", kind}, {"message", e.what()}, {"exit_code", code}};
  const auto text = record.dump();
  std::cerr << text << '\n';
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream f(out_dir / "error.json", std::ios::trunc);
    if (f) f << record.dump(2) << '\n';
  }
  return code;
}

}  // namespace csslab::cli
