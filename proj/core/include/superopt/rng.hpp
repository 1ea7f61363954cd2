#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace superopt {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the independent stream for replicate `index`: mix64(seed + index).
/// Replicates therefore do not depend on thread scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace superopt
