#pragma once

#include <cstdint>
#include <random>

namespace hyperlocal {

/// The engine's output sequence is fixed by the standard; the distributions
/// below are implemented here so that samples are identical across standard
/// library implementations.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Per-trial seed derivation: seed_i = mix64(master + (i + 1) * golden_gamma).
/// Distinct indices give statistically independent streams.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Engine& engine);

/// Uniform double in (0, 1].
double uniform_open_closed(Engine& engine);

/// Uniform integer in [0, bound), unbiased. `bound` must be positive.
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound);

bool bernoulli(Engine& engine, double p);

/// Number of failures before the first success of Bernoulli(p) trials.
/// Requires 0 < p <= 1.
std::uint64_t geometric_failures(Engine& engine, double p);

/// Poisson(lambda) variate: sequential inversion for lambda <= 30, Hörmann's
/// PTRS transformed rejection above.
std::uint64_t poisson(Engine& engine, double lambda);

}  // namespace hyperlocal
