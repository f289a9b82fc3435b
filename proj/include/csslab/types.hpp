#pragma once

#include <array>
#include <string_view>

namespace csslab {

/// PU absent (h0) or present (h1).
enum class Hypothesis { h0, h1 };

/// Fusion-center soft combining rule.
enum class CombinerKind { slc, mrc, sls };

inline constexpr std::array<CombinerKind, 3> kAllCombiners = {
    CombinerKind::slc, CombinerKind::mrc, CombinerKind::sls};

std::string_view to_string(Hypothesis h);
std::string_view to_string(CombinerKind kind);

/// Case-insensitive; accepts "slc", "mrc", "sls". Throws InvalidArgument otherwise.
CombinerKind parse_combiner(std::string_view text);

}  // namespace csslab
