#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hyperlocal {

using VertexId = std::uint32_t;
using Weight = std::int64_t;

struct Neighbor {
  VertexId to;
  Weight weight;
  bool operator==(const Neighbor&) const = default;
};

struct WeightedEdge {
  VertexId u;
  VertexId v;
  Weight weight;
};

/// Symmetric positively-weighted simple graph in CSR form, immutable after
/// construction.
///
/// Vertices are 0..materialized_count()-1. A graph may also carry
/// `isolated_padding` further vertices that are known to be isolated and are
/// never materialized; they count towards vertex_count() (and so towards
/// uniformly rooted measures and matrix dimensions) but have no ids.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Each unordered pair may appear at most once; weights must be >= 1 and
  /// self-loops are rejected.
  WeightedGraph(std::size_t materialized, std::span<const WeightedEdge> edges,
                std::uint64_t isolated_padding = 0);

  std::uint64_t vertex_count() const { return materialized_count() + padding_; }
  std::size_t materialized_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::uint64_t isolated_padding() const { return padding_; }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const Neighbor> neighbors(VertexId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// 0 when u and v are not adjacent.
  Weight weight(VertexId u, VertexId v) const;

  /// Every edge once, with u < v, in increasing (u, v) order.
  std::vector<WeightedEdge> edges() const;

  bool operator==(const WeightedGraph&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> targets_;
  std::uint64_t padding_ = 0;
};

struct RootedWeightedGraph {
  WeightedGraph graph;
  VertexId root = 0;
};

}  // namespace hyperlocal
