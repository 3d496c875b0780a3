#pragma once

#include <cstdint>
#include <random>

namespace pcsft::detail {

/// Engine addressed by (seed, stream, index). Different triples give
/// statistically independent streams; the same triple always replays.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0,
                                   std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace pcsft::detail
