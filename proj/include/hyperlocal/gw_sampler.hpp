#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hyperlocal/hypergraph.hpp"
#include "hyperlocal/weighted_graph.hpp"

namespace hyperlocal {

struct GWParams {
  int d = 1;             ///< block size
  double lambda = 0.0;   ///< Poisson rate of block offspring
  int depth = 0;         ///< block-generations below the root
  double expected_size_cap = 1e7;
};

/// One step of an address: (block index, index within block), both 1-based.
using AddressStep = std::pair<std::uint32_t, std::uint32_t>;
/// Empty address = the root o.
using Address = std::vector<AddressStep>;

/// d-block Galton–Watson graph truncated after `depth` block-generations.
///
/// Vertex ids follow breadth-first generation order, which coincides with the
/// address order: root 0, then generation 1 in (block, within) order, etc.
struct BlockTreeSample {
  RootedWeightedGraph tree;
  int d = 1;
  int depth = 0;
  std::vector<Address> addresses;
  std::vector<int> generation;
  std::vector<VertexId> parent;           ///< parent[root] == root
  std::vector<std::uint32_t> block_count; ///< number of d-blocks drawn by each vertex

  std::size_t size() const { return addresses.size(); }
  /// Z_t for t = 0..depth.
  std::vector<std::uint64_t> generation_sizes() const;
};

/// Expected vertex count sum_{g=0}^{depth} (d*lambda)^g of a depth-truncated sample.
double expected_tree_size(const GWParams& params);

/// Breadth-first sampler. Throws std::invalid_argument for d < 1, lambda < 0,
/// depth < 0 or an expected size above `expected_size_cap`.
BlockTreeSample sample_gw(const GWParams& params, std::uint64_t seed);

/// (T_k, S_r): hypertree whose r-set line graph rooted at `root` is the
/// block tree.
struct RootedHypergraph {
  Hypergraph hypergraph;
  RSet root;
  std::vector<RSet> vertex_rsets;  ///< r-set assigned to each block-tree vertex
};

/// Root -> {1..r}; each d-block child of v becomes S_v plus k-r fresh vertices
/// (allocated from a counter in breadth-first order); the non-S_v r-subsets
/// of the hyperedge, sorted lexicographically, go to within-block indices
/// 1..d. Throws std::invalid_argument unless tree.d == C(k,r) - 1.
RootedHypergraph gw_to_hypertree(const BlockTreeSample& tree, int k, int r);

/// d = C(k, r) - 1.
int block_size_for(int k, int r);

}  // namespace hyperlocal
