#pragma once

#include <cstdint>
#include <random>

namespace fhl {

using Rng = std::mt19937_64;

/// Independent stream for block `block` of a run seeded with `seed`.
/// The stream depends only on (seed, block), so results do not depend on how
/// blocks are scheduled across threads.
inline Rng derived_stream(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

}  // namespace fhl
