#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hyperlocal {

using u128 = unsigned __int128;

/// Vertex ids of hypergraphs are 1-based.
using Vertex = std::int32_t;

/// Exact binomial coefficient C(n, k). Throws std::overflow_error when the
/// value does not fit in 128 bits. C(n, k) = 0 for k > n.
u128 binomial(std::uint64_t n, std::uint64_t k);

/// Same as binomial() but requires the result to fit in 64 bits.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

/// Closest double to an exact 128-bit count.
double to_double(u128 value);

std::string to_string(u128 value);

/// The k-set of [1..n] with the given rank in lexicographic order.
std::vector<Vertex> unrank_kset(std::uint64_t rank, int n, int k);

/// Inverse of unrank_kset; `set` must be strictly increasing.
std::uint64_t rank_kset(std::span<const Vertex> set, int n);

/// Calls `visit` with every r-subset of `set` (sorted input), in
/// lexicographic order. The span passed to `visit` is only valid during the
/// call.
void for_each_subset(std::span<const Vertex> set, int r,
                     const std::function<void(std::span<const Vertex>)>& visit);

/// Advances `combo` (strictly increasing, values in [1..n]) to its
/// lexicographic successor. Returns false after the last combination.
bool next_combination(std::vector<Vertex>& combo, int n);

}  // namespace hyperlocal
