#include "hyperlocal/combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hyperlocal {

namespace {

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

u128 binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    // result = result * (n - i) / (i + 1), kept exact by cancelling first.
    u128 num = n - i;
    u128 den = i + 1;
    u128 g = gcd128(result, den);
    result /= g;
    den /= g;
    num /= den;  // exact: den divides (n - i) once coprime to result
    u128 next;
    if (__builtin_mul_overflow(result, num, &next)) {
      throw std::overflow_error("binomial coefficient C(" + std::to_string(n) + "," +
                                std::to_string(k) + ") exceeds 128 bits");
    }
    result = next;
  }
  return result;
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  u128 value = binomial(n, k);
  if (value > std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("binomial coefficient C(" + std::to_string(n) + "," +
                              std::to_string(k) + ") exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

double to_double(u128 value) {
  auto hi = static_cast<std::uint64_t>(value >> 64);
  auto lo = static_cast<std::uint64_t>(value);
  return static_cast<double>(hi) * 18446744073709551616.0 + static_cast<double>(lo);
}

std::string to_string(u128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

std::vector<Vertex> unrank_kset(std::uint64_t rank, int n, int k) {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(k));
  Vertex candidate = 1;
  for (int pos = 0; pos < k; ++pos) {
    for (;; ++candidate) {
      // k-sets whose element at `pos` is `candidate`, given the prefix.
      std::uint64_t block = binomial_u64(static_cast<std::uint64_t>(n - candidate),
                                         static_cast<std::uint64_t>(k - pos - 1));
      if (rank < block) break;
      rank -= block;
    }
    out.push_back(candidate);
    ++candidate;
  }
  return out;
}

std::uint64_t rank_kset(std::span<const Vertex> set, int n) {
  const int k = static_cast<int>(set.size());
  std::uint64_t rank = 0;
  Vertex candidate = 1;
  for (int pos = 0; pos < k; ++pos) {
    for (; candidate < set[static_cast<std::size_t>(pos)]; ++candidate) {
      rank += binomial_u64(static_cast<std::uint64_t>(n - candidate),
                           static_cast<std::uint64_t>(k - pos - 1));
    }
    ++candidate;
  }
  return rank;
}

void for_each_subset(std::span<const Vertex> set, int r,
                     const std::function<void(std::span<const Vertex>)>& visit) {
  const int m = static_cast<int>(set.size());
  if (r < 0 || r > m) return;
  std::vector<int> idx(static_cast<std::size_t>(r));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Vertex> subset(static_cast<std::size_t>(r));
  while (true) {
    for (int i = 0; i < r; ++i) subset[i] = set[static_cast<std::size_t>(idx[i])];
    visit(subset);
    int i = r - 1;
    while (i >= 0 && idx[i] == m - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool next_combination(std::vector<Vertex>& combo, int n) {
  const int k = static_cast<int>(combo.size());
  int i = k - 1;
  while (i >= 0 && combo[i] == n - k + i + 1) --i;
  if (i < 0) return false;
  ++combo[i];
  for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
  return true;
}

}  // namespace hyperlocal
