#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hyperlocal/combinatorics.hpp"

namespace hyperlocal {

/// A strictly increasing r-tuple of vertex ids. Ordered lexicographically.
class RSet {
 public:
  RSet() = default;
  /// Sorts `members`; throws std::invalid_argument on repeated members.
  explicit RSet(std::vector<Vertex> members);
  RSet(std::initializer_list<Vertex> members);

  std::span<const Vertex> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(Vertex v) const;
  std::string to_string() const;

  auto operator<=>(const RSet&) const = default;
  bool operator==(const RSet&) const = default;

 private:
  std::vector<Vertex> members_;
};

using Hyperedge = std::vector<Vertex>;

/// k-uniform hypergraph on vertices [1..n] with set semantics on hyperedges.
/// Hyperedges are kept sorted (each internally and the list lexicographically).
class Hypergraph {
 public:
  Hypergraph() = default;
  /// Validates every hyperedge (k distinct vertices in [1..n]) and rejects
  /// duplicates. Hyperedge members may be given in any order.
  Hypergraph(int n, int k, std::vector<Hyperedge> edges);

  int n() const { return n_; }
  int k() const { return k_; }
  const std::vector<Hyperedge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool operator==(const Hypergraph&) const = default;

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<Hyperedge> edges_;
};

/// Parameters of H(n, k, p) together with the root cardinality r and the
/// expected r-set degree lambda = C(n-r, k-r) * p.
struct ModelParams {
  int n = 0;
  int k = 0;
  int r = 1;
  double lambda = 0.0;
  double p = 0.0;
};

/// Resolves p = lambda / C(n-r, k-r) with the binomial taken exactly.
/// lambda = 0 is accepted and gives p = 0.
ModelParams resolve_params(int n, int k, int r, double lambda);

/// Builds params from an explicit hyperedge probability; lambda is derived.
ModelParams params_from_probability(int n, int k, double p, int r = 1);

/// Every k-set of [1..n] is kept independently with probability p. Uses
/// geometric skips over the lexicographic k-set order when p < 0.01 and a
/// Bernoulli scan otherwise.
Hypergraph sample_hypergraph(const ModelParams& params, std::uint64_t seed);

/// D_S: number of hyperedges containing every member of `s`.
std::int64_t degree(const Hypergraph& h, const RSet& s);

/// Vertex -> indices of hyperedges containing it (index 0 unused).
std::vector<std::vector<std::uint32_t>> incidence_lists(const Hypergraph& h);

}  // namespace hyperlocal
