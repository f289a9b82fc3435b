#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace csslab {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-style stream split: the derived seed depends only on the base seed
/// and the path of tags, never on the order in which streams are requested.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t tag : path) h = splitmix64(h ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
  return h;
}

inline std::uint64_t seed_tag(double value) noexcept { return std::bit_cast<std::uint64_t>(value); }

}  // namespace csslab
