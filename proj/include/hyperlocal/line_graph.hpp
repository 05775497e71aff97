#pragma once

#include <optional>
#include <vector>

#include "hyperlocal/hypergraph.hpp"
#include "hyperlocal/weighted_graph.hpp"

namespace hyperlocal {

/// G_r(H): vertices are all C(n, r) r-sets of [1..n]; S1 ~ S2 with weight
/// |{e : S1, S2 subset of e}|.
///
/// Only r-sets lying inside some hyperedge are materialized (ids follow the
/// lexicographic order of their r-sets); the remaining r-sets are carried as
/// the graph's isolated padding.
struct LineGraph {
  WeightedGraph graph;
  std::vector<RSet> labels;  ///< labels[id] is the r-set of materialized vertex id
  int r = 0;

  /// Materialized id of `s`, or nullopt when `s` is isolated.
  std::optional<VertexId> find(const RSet& s) const;

  /// C(n, r).
  std::uint64_t vertex_count() const { return graph.vertex_count(); }
};

/// Throws std::invalid_argument unless 1 <= r < k.
LineGraph build_r_line_graph(const Hypergraph& h, int r);

/// The line graph rooted at `root`. An isolated root yields a single-vertex
/// graph.
RootedWeightedGraph rooted_line_graph(const LineGraph& lg, const RSet& root);

}  // namespace hyperlocal
