#include "hyperlocal/line_graph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hyperlocal {

std::optional<VertexId> LineGraph::find(const RSet& s) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), s);
  if (it == labels.end() || *it != s) return std::nullopt;
  return static_cast<VertexId>(it - labels.begin());
}

LineGraph build_r_line_graph(const Hypergraph& h, int r) {
  if (r < 1 || r >= h.k()) throw std::invalid_argument("r must satisfy 1 <= r < k");

  // r-subsets of each hyperedge, in lexicographic order.
  std::vector<std::vector<RSet>> subsets(h.edge_count());
  std::vector<RSet> all;
  for (std::size_t i = 0; i < h.edge_count(); ++i) {
    for_each_subset(h.edges()[i], r, [&](std::span<const Vertex> s) {
      subsets[i].emplace_back(std::vector<Vertex>(s.begin(), s.end()));
    });
    all.insert(all.end(), subsets[i].begin(), subsets[i].end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  LineGraph lg;
  lg.r = r;
  lg.labels = std::move(all);

  std::map<std::pair<VertexId, VertexId>, Weight> weights;
  std::vector<VertexId> ids;
  for (const auto& group : subsets) {
    ids.clear();
    for (const auto& s : group) ids.push_back(*lg.find(s));
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        ++weights[{std::min(ids[a], ids[b]), std::max(ids[a], ids[b])}];
      }
    }
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(weights.size());
  for (const auto& [key, w] : weights) edges.push_back({key.first, key.second, w});

  const std::uint64_t total = binomial_u64(static_cast<std::uint64_t>(h.n()),
                                           static_cast<std::uint64_t>(r));
  lg.graph = WeightedGraph(lg.labels.size(), edges, total - lg.labels.size());
  return lg;
}

RootedWeightedGraph rooted_line_graph(const LineGraph& lg, const RSet& root) {
  if (auto id = lg.find(root)) return {lg.graph, *id};
  return {WeightedGraph(1, {}), 0};
}

}  // namespace hyperlocal
