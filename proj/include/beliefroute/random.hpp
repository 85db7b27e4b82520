#pragma once

#include <cstdint>
#include <random>

namespace beliefroute {

using Rng = std::mt19937_64;

/// Independent stream seed for (master, stream tag, index). SplitMix64
/// finalizer, so neighbouring indices give uncorrelated generators and the
/// result never depends on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ stream) ^ index);
}

// Stream tags used by the pipeline.
inline constexpr std::uint64_t kStreamNodes = 1;
inline constexpr std::uint64_t kStreamCircuits = 2;
inline constexpr std::uint64_t kStreamTruth = 3;
inline constexpr std::uint64_t kStreamMeasurements = 4;

}  // namespace beliefroute
