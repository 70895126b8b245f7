#pragma once

#include <cstdint>
#include <random>

namespace pbl {

/// Engine used by every sampler in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and a stream index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Engine for stream `stream` of `master`. Streams with distinct indices are
/// statistically independent for all practical purposes.
Rng make_rng(std::uint64_t master, std::uint64_t stream = 0);

// Fixed stream ids so that generators sharing a master seed never overlap.
namespace stream {
inline constexpr std::uint64_t kTrainData = 1;
inline constexpr std::uint64_t kTestData = 2;
inline constexpr std::uint64_t kPosteriorSamples = 3;
inline constexpr std::uint64_t kGeneralization = 4;
inline constexpr std::uint64_t kMgf = 5;
inline constexpr std::uint64_t kBootstrap = 6;
inline constexpr std::uint64_t kJensen = 7;
}  // namespace stream

}  // namespace pbl
