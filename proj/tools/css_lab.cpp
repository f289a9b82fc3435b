#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csslab/cli.hpp"
#include "csslab/errors.hpp"

namespace {

int threads_from_env() {
  const char* env = std::getenv("CSS_LAB_THREADS");
  if (!env || !*env) return 0;
  try {
    return std::stoi(env);
  } catch (const std::exception&) {
    throw csslab::InvalidArgument("CSS_LAB_THREADS: expected an integer, got '" + std::string(env) + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = csslab::cli;

  CLI::App app{"Cooperative spectrum-sensing lab: Monte Carlo ROC curves and detection theory"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));

  std::string subcommand;
  std::string scenario_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int threads = -1;

  app.add_option("subcommand", subcommand, "What to run")
      ->required()
      ->check(CLI::IsMember(cli::subcommands()));
  app.add_option("--scenario", scenario_path, "Scenario file (key = value lines); defaults if omitted");
  app.add_option("--set", overrides, "Override one scenario key, key=value (repeatable)");
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--threads", threads, "Worker threads (0 = all cores; default $CSS_LAB_THREADS)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitValidation;
  }

  try {
    if (threads < 0) threads = threads_from_env();
    const auto scenario = scenario_path.empty() ? cli::parse_scenario_text("", overrides)
                                                : cli::parse_scenario(scenario_path, overrides);
    const auto manifest = cli::run_command(subcommand, scenario, out_dir, threads);
    for (const auto& f : manifest.outputs) std::cout << out_dir << '/' << f << '\n';
    return cli::kExitOk;
  } catch (const std::exception& e) {
    return cli::report_failure(e, out_dir);
  }
}
