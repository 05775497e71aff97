#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "hyperlocal/weighted_graph.hpp"

namespace hyperlocal {

/// Isomorphism-invariant encoding of a rooted weighted graph:
/// code(g1) == code(g2) iff g1 and g2 are isomorphic by a root- and
/// weight-preserving bijection.
struct CanonicalForm {
  std::string code;

  /// FNV-1a of the code; used as a short key in exports.
  std::uint64_t hash() const;
  std::string hex() const;

  auto operator<=>(const CanonicalForm&) const = default;
  bool operator==(const CanonicalForm&) const = default;
};

inline constexpr std::size_t kDefaultCanonicalSizeCap = 100000;

/// Induced weighted subgraph on the vertices within graph distance t of the
/// root. Vertices are renumbered in breadth-first order, root first.
RootedWeightedGraph ball(const WeightedGraph& g, VertexId root, std::size_t t);
RootedWeightedGraph ball(const RootedWeightedGraph& g, std::size_t t);

/// Exact canonical form. The root component is decomposed into its
/// block-cut tree hanging from the root; uniform-weight clique blocks are
/// encoded directly and any other block is canonically labelled by
/// individualization-refinement (weighted colour refinement, branching on
/// one vertex per twin class of the first non-trivial cell). Components not
/// containing the root contribute the minimum over their vertices of the
/// rooted code. Throws std::length_error above `size_cap` materialized
/// vertices.
CanonicalForm canonicalize(const RootedWeightedGraph& g,
                           std::size_t size_cap = kDefaultCanonicalSizeCap);

/// Same as canonicalize(ball(g, root, t)) without the intermediate copy of
/// unrelated parts of `g`.
CanonicalForm canonical_ball(const WeightedGraph& g, VertexId root, std::size_t t,
                             std::size_t size_cap = kDefaultCanonicalSizeCap);

bool are_isomorphic(const RootedWeightedGraph& a, const RootedWeightedGraph& b);

/// m = 1 / (1 + T), T the largest radius whose balls are isomorphic.
/// agreement_depth is empty when the balls agree at every radius (m = 0).
struct LocalDistance {
  std::optional<std::size_t> agreement_depth;

  std::uint64_t numerator() const { return agreement_depth ? 1 : 0; }
  std::uint64_t denominator() const { return agreement_depth ? *agreement_depth + 1 : 1; }
  double value() const {
    return static_cast<double>(numerator()) / static_cast<double>(denominator());
  }
};

LocalDistance local_distance(const RootedWeightedGraph& a, const RootedWeightedGraph& b);

/// Finite-depth marginal of U(G): how many roots see each depth-t ball class.
struct NeighborhoodDistribution {
  std::size_t depth = 0;
  std::map<CanonicalForm, std::uint64_t> counts;
  std::uint64_t total = 0;
  /// Optional: one ball per class (the one seen at the smallest root id).
  std::map<CanonicalForm, RootedWeightedGraph> representatives;

  double frequency(const CanonicalForm& c) const;
};

struct MeasureOptions {
  std::size_t threads = 1;
  bool keep_representatives = false;
};

/// Every vertex of g (padding included) as a root.
NeighborhoodDistribution empirical_measure(const WeightedGraph& g, std::size_t depth,
                                           const MeasureOptions& options = {});

/// Adds the depth-t classes of the given materialized roots, plus
/// `isolated_roots` roots known to be isolated.
void accumulate_measure(NeighborhoodDistribution& into, const WeightedGraph& g,
                        std::span<const VertexId> roots, std::uint64_t isolated_roots,
                        const MeasureOptions& options = {});

/// Commutative, associative merge of counts.
void merge_into(NeighborhoodDistribution& into, const NeighborhoodDistribution& from);

/// Class code of an isolated root.
CanonicalForm isolated_root_form();

/// TV = 1/2 sum |p_c - q_c| after merging every class whose pooled count
/// (count in a + count in b) is below `min_pooled` into one bucket.
double total_variation(const NeighborhoodDistribution& a, const NeighborhoodDistribution& b,
                       std::uint64_t min_pooled = 5);

/// f(G, u, v) for an edge {u, v}; must be nonnegative.
using EdgeFunctional = std::function<double(const WeightedGraph&, VertexId, VertexId)>;

struct MassTransportResult {
  double outgoing = 0.0;  ///< (1/N) sum_o sum_v f(G, o, v)
  double incoming = 0.0;  ///< (1/N) sum_o sum_v f(G, v, o)
  bool balanced = false;  ///< equal within the relative tolerance
};

/// Evaluates both sides of the mass-transport identity for the uniformly
/// rooted measure U(G) by exact summation over all vertices and their
/// neighbours. Throws std::invalid_argument if f returns a negative value.
MassTransportResult mass_transport_check(const WeightedGraph& g, const EdgeFunctional& f,
                                         double relative_tolerance = 1e-12);

}  // namespace hyperlocal
