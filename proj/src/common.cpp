#include <algorithm>
#include <cctype>
#include <iostream>
#include <string>

#include "csslab/errors.hpp"
#include "csslab/types.hpp"

namespace csslab {

namespace {

WarningSink& sink() {
  static WarningSink s = [](std::string_view msg) { std::clog << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) { sink() = std::move(s); }

void warn(std::string_view message) {
  if (auto& s = sink()) s(message);
}

std::string_view to_string(Hypothesis h) { return h == Hypothesis::h1 ? "H1" : "H0"; }

std::string_view to_string(CombinerKind kind) {
  switch (kind) {
    case CombinerKind::slc: return "SLC";
    case CombinerKind::mrc: return "MRC";
    case CombinerKind::sls: return "SLS";
  }
  return "?";
}

CombinerKind parse_combiner(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "slc") return CombinerKind::slc;
  if (lower == "mrc") return CombinerKind::mrc;
  if (lower == "sls") return CombinerKind::sls;
  throw InvalidArgument("unknown combiner '" + std::string(text) + "' (expected SLC, MRC or SLS)");
}

}  // namespace csslab
