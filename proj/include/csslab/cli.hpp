#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "csslab/harness.hpp"

namespace csslab::cli {

inline constexpr std::string_view kToolVersion = "0.3.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

std::vector<std::string> valid_keys();

/// Flat `key = value` document, `#` starts a comment. Overrides are
/// `key=value` strings applied after the document.
harness::Scenario parse_scenario_text(std::string_view text,
                                      const std::vector<std::string>& overrides = {});
harness::Scenario parse_scenario(const std::filesystem::path& path,
                                 const std::vector<std::string>& overrides = {});

/// Every key with its resolved value, one `key = value` line each, fixed order.
std::string canonical_text(const harness::Scenario& s);

/// SHA-256 of canonical_text, lowercase hex.
std::string scenario_digest(const harness::Scenario& s);

/// 12 significant digits, '.' decimal point regardless of locale.
std::string format_number(double v);

std::vector<std::string> subcommands();

struct RunManifest {
  std::string tool_version;
  std::string scenario_digest;
  std::string started_at;
  std::vector<std::string> outputs;
};

/// Runs one subcommand and writes its artifacts plus manifest.json into out_dir.
RunManifest run_command(std::string_view subcommand, const harness::Scenario& s,
                        const std::filesystem::path& out_dir, int threads = 1);

/// Maps an exception to the documented exit code and writes error.json into
/// out_dir when it is writable. Returns the exit code.
int report_failure(const std::exception& e, const std::filesystem::path& out_dir);

}  // namespace csslab::cli
