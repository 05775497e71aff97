#include "hyperlocal/gw_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hyperlocal/random.hpp"

namespace hyperlocal {

std::vector<std::uint64_t> BlockTreeSample::generation_sizes() const {
  std::vector<std::uint64_t> sizes(static_cast<std::size_t>(depth) + 1, 0);
  for (int g : generation) {
    if (static_cast<std::size_t>(g) >= sizes.size()) sizes.resize(static_cast<std::size_t>(g) + 1, 0);
    ++sizes[static_cast<std::size_t>(g)];
  }
  return sizes;
}

double expected_tree_size(const GWParams& params) {
  const double m = params.d * params.lambda;
  double total = 0.0;
  double term = 1.0;
  for (int g = 0; g <= params.depth; ++g) {
    total += term;
    term *= m;
  }
  return total;
}

int block_size_for(int k, int r) {
  if (r < 1 || r >= k) throw std::invalid_argument("r must satisfy 1 <= r < k");
  return static_cast<int>(binomial_u64(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r))) - 1;
}

BlockTreeSample sample_gw(const GWParams& params, std::uint64_t seed) {
  if (params.d < 1) throw std::invalid_argument("block size d must be >= 1");
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  if (params.depth < 0) throw std::invalid_argument("depth must be nonnegative");
  if (expected_tree_size(params) > params.expected_size_cap) {
    throw std::invalid_argument("expected tree size exceeds the configured cap");
  }

  BlockTreeSample s;
  s.d = params.d;
  s.depth = params.depth;
  s.addresses.emplace_back();
  s.generation.push_back(0);
  s.parent.push_back(0);
  s.block_count.push_back(0);

  std::vector<WeightedEdge> edges;
  Engine engine(seed);
  // Vertices are appended in BFS order, so scanning by index is the queue.
  for (VertexId v = 0; v < s.addresses.size(); ++v) {
    if (s.generation[v] >= params.depth) continue;
    const auto blocks = static_cast<std::uint32_t>(poisson(engine, params.lambda));
    s.block_count[v] = blocks;
    for (std::uint32_t b = 1; b <= blocks; ++b) {
      const auto first = static_cast<VertexId>(s.addresses.size());
      for (std::uint32_t j = 1; j <= static_cast<std::uint32_t>(params.d); ++j) {
        Address a = s.addresses[v];
        a.emplace_back(b, j);
        s.addresses.push_back(std::move(a));
        s.generation.push_back(s.generation[v] + 1);
        s.parent.push_back(v);
        s.block_count.push_back(0);
      }
      const auto last = static_cast<VertexId>(s.addresses.size());
      for (VertexId x = first; x < last; ++x) {
        edges.push_back({v, x, 1});
        for (VertexId y = x + 1; y < last; ++y) edges.push_back({x, y, 1});
      }
    }
  }
  s.tree.graph = WeightedGraph(s.addresses.size(), edges);
  s.tree.root = 0;
  return s;
}

RootedHypergraph gw_to_hypertree(const BlockTreeSample& tree, int k, int r) {
  if (tree.d != block_size_for(k, r)) {
    throw std::invalid_argument("block size d must equal C(k,r) - 1");
  }
  const std::size_t count = tree.size();
  std::vector<RSet> rsets(count);
  std::vector<Vertex> root_members(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) root_members[static_cast<std::size_t>(i)] = i + 1;
  rsets[0] = RSet(root_members);
  Vertex next_fresh = r + 1;

  std::vector<Hyperedge> edges;
  // Children of a vertex occupy a contiguous id range in BFS order.
  VertexId child = 1;
  for (VertexId v = 0; v < count; ++v) {
    for (std::uint32_t b = 0; b < tree.block_count[v]; ++b) {
      Hyperedge e(rsets[v].members().begin(), rsets[v].members().end());
      for (int i = 0; i < k - r; ++i) e.push_back(next_fresh++);
      std::sort(e.begin(), e.end());
      std::vector<RSet> others;
      for_each_subset(e, r, [&](std::span<const Vertex> sub) {
        RSet s(std::vector<Vertex>(sub.begin(), sub.end()));
        if (s != rsets[v]) others.push_back(std::move(s));
      });
      for (int j = 0; j < tree.d; ++j) {
        if (child >= count || tree.parent[child] != v) {
          throw std::invalid_argument("block tree is not in breadth-first order");
        }
        rsets[child++] = others[static_cast<std::size_t>(j)];
      }
      edges.push_back(std::move(e));
    }
  }
  const int n = std::max<int>(next_fresh - 1, k);
  return RootedHypergraph{Hypergraph(n, k, std::move(edges)), rsets[0], std::move(rsets)};
}

}  // namespace hyperlocal
