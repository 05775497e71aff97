#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperlocal/hypergraph.hpp"

namespace hyperlocal {

/// One iteration of the breadth-first exploration of an r-set rooted
/// hypergraph. Set sizes are taken after the step.
struct ExplorationStep {
  std::size_t t = 0;
  RSet explored;                     ///< v_t
  std::vector<std::uint32_t> fresh_edges;  ///< R_t as hyperedge indices, lexicographic
  std::vector<RSet> discovered;      ///< J_t, in discovery order
  std::size_t active_rsets = 0;      ///< |A_t| counted in r-sets
  std::size_t active_vertices = 0;   ///< |union of members of A_t|
  std::size_t unexplored_vertices = 0;  ///< |U_t|, vertex level
  std::size_t covered = 0;           ///< |C_t| (= t)
  std::size_t covered_edges = 0;     ///< |CE_t|
  std::size_t new_vertices = 0;      ///< |I_t|: members of J_t removed from U
  std::int64_t x = 0;                ///< X_t = |J_t|
  std::int64_t y = 0;                ///< Y_t (root step: full star size)
  std::int64_t z = 0;                ///< Z_t = |R_t|
  bool y_neq_z = false;
  bool edge_escapes = false;         ///< some e in R_t has |e \ U_{t-1}| > r
  bool edge_overlap = false;         ///< some e != e' in R_t with |e ∩ e'| > r
  std::vector<RSet> active_members;  ///< A_t, only when requested
};

struct ExplorationTrace {
  int n = 0;
  int k = 0;
  int r = 0;
  RSet root;
  std::vector<ExplorationStep> steps;
  /// t0 with A_{t0} empty; nullopt when the step budget ran out first.
  std::optional<std::size_t> terminated_at;
  bool truncated = false;
};

struct ExploreOptions {
  /// 0 means C(n, r), the vertex count of G_r(H).
  std::size_t max_steps = 0;
  bool record_active_members = false;
};

/// Breadth-first exploration from `root`. The active r-set with the smallest
/// discovery address is explored next (a FIFO queue in discovery order).
/// J_t holds the r-subsets of the hyperedges of R_t that have not been
/// discovered before; U_t is the set of vertices not belonging to any
/// discovered r-set.
ExplorationTrace explore(const Hypergraph& h, const RSet& root, ExploreOptions options = {});

struct DeviationEvent {
  bool occurred = false;
  std::optional<std::size_t> first_step;
};

struct DeviationReport {
  DeviationEvent y_neq_z;
  DeviationEvent edge_escapes;
  DeviationEvent edge_overlap;
  std::size_t within_depth = 0;  ///< min(t0, depth) (or min(steps, depth) when truncated)

  bool any() const { return y_neq_z.occurred || edge_escapes.occurred || edge_overlap.occurred; }
};

/// Scans steps 1..min(t0, depth) for the three deviation events.
DeviationReport detect_deviations(const ExplorationTrace& trace, int r, std::size_t depth);

/// CSV with columns t,A,U,C,R,X,Y,Z,flags (flags: any of "Y" "E" "O" joined by '|').
std::string trace_to_csv(const ExplorationTrace& trace);

}  // namespace hyperlocal
