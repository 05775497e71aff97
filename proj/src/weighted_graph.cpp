#include "hyperlocal/weighted_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace hyperlocal {

WeightedGraph::WeightedGraph(std::size_t materialized, std::span<const WeightedEdge> edges,
                             std::uint64_t isolated_padding)
    : offsets_(materialized + 1, 0), padding_(isolated_padding) {
  for (const auto& e : edges) {
    if (e.u >= materialized || e.v >= materialized) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("self-loops are not allowed");
    if (e.weight < 1) throw std::invalid_argument("edge weights must be >= 1");
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  targets_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) {
    targets_[cursor[e.u]++] = Neighbor{e.v, e.weight};
    targets_[cursor[e.v]++] = Neighbor{e.u, e.weight};
  }
  for (std::size_t v = 0; v < materialized; ++v) {
    auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(first, last, [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
    if (std::adjacent_find(first, last, [](const Neighbor& a, const Neighbor& b) {
          return a.to == b.to;
        }) != last) {
      throw std::invalid_argument("duplicate edge");
    }
  }
}

Weight WeightedGraph::weight(VertexId u, VertexId v) const {
  auto adj = neighbors(u);
  auto it = std::lower_bound(adj.begin(), adj.end(), v,
                             [](const Neighbor& a, VertexId x) { return a.to < x; });
  return (it != adj.end() && it->to == v) ? it->weight : 0;
}

std::vector<WeightedEdge> WeightedGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count());
  for (VertexId u = 0; u < materialized_count(); ++u) {
    for (const auto& nb : neighbors(u)) {
      if (u < nb.to) out.push_back({u, nb.to, nb.weight});
    }
  }
  return out;
}

}  // namespace hyperlocal
