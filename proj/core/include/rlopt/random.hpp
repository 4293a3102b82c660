#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rlopt {

// std::mt19937_64's output sequence is fixed by the standard; the helpers
// below avoid the implementation-defined <random> distributions so seeded
// results are identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(Rng& rng);

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent child seed for (stream, index) under a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

// Named streams so different consumers of one run seed never share draws.
namespace stream {
inline constexpr std::uint64_t kProposal = 1;
inline constexpr std::uint64_t kMetaEpisode = 2;
inline constexpr std::uint64_t kAgent = 3;
inline constexpr std::uint64_t kBandit = 4;
inline constexpr std::uint64_t kReplay = 5;
}  // namespace stream

}  // namespace rlopt
