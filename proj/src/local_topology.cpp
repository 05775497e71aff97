#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hyperlocal/local_topology.hpp"

namespace hyperlocal {

namespace {

// Per-thread map from global to ball-local ids; entries are restored to
// UINT32_MAX after every use so one allocation serves every root.
std::vector<std::uint32_t>& scratch_for(std::size_t n) {
  thread_local std::vector<std::uint32_t> scratch;
  if (scratch.size() < n) scratch.assign(n, UINT32_MAX);
  return scratch;
}

struct Tally {
  std::map<CanonicalForm, std::uint64_t> counts;
  std::map<CanonicalForm, std::pair<VertexId, RootedWeightedGraph>> reps;
};

void tally_roots(Tally& out, const WeightedGraph& g, std::span<const VertexId> roots,
                 std::size_t depth, bool keep) {
  const CanonicalForm isolated = isolated_root_form();
  for (VertexId root : roots) {
    if (g.degree(root) == 0) {
      ++out.counts[isolated];
      if (keep && !out.reps.count(isolated)) out.reps.emplace(isolated, std::pair{root, ball(g, root, 0)});
      continue;
    }
    auto b = ball(g, root, depth);
    auto form = canonicalize(b);
    ++out.counts[form];
    if (keep) {
      auto it = out.reps.find(form);
      if (it == out.reps.end()) {
        out.reps.emplace(std::move(form), std::pair{root, std::move(b)});
      } else if (root < it->second.first) {
        it->second = {root, std::move(b)};
      }
    }
  }
}

}  // namespace

RootedWeightedGraph ball(const WeightedGraph& g, VertexId root, std::size_t t) {
  const std::size_t n = g.materialized_count();
  if (root >= n) throw std::invalid_argument("root is not a materialized vertex");
  auto& local = scratch_for(n);
  std::vector<VertexId> order{root};
  local[root] = 0;
  std::size_t level_end = 1;
  std::size_t level = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == level_end) {
      ++level;
      level_end = order.size();
    }
    if (level >= t) break;
    for (const auto& nb : g.neighbors(order[i])) {
      if (local[nb.to] == UINT32_MAX) {
        local[nb.to] = static_cast<std::uint32_t>(order.size());
        order.push_back(nb.to);
      }
    }
  }
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& nb : g.neighbors(order[i])) {
      const std::uint32_t j = local[nb.to];
      if (j != UINT32_MAX && i < j) edges.push_back({static_cast<VertexId>(i), j, nb.weight});
    }
  }
  for (VertexId v : order) local[v] = UINT32_MAX;
  return RootedWeightedGraph{WeightedGraph(order.size(), edges), 0};
}

RootedWeightedGraph ball(const RootedWeightedGraph& g, std::size_t t) {
  return ball(g.graph, g.root, t);
}

CanonicalForm canonical_ball(const WeightedGraph& g, VertexId root, std::size_t t,
                             std::size_t size_cap) {
  return canonicalize(ball(g, root, t), size_cap);
}

CanonicalForm isolated_root_form() { return CanonicalForm{"R()"}; }

LocalDistance local_distance(const RootedWeightedGraph& a, const RootedWeightedGraph& b) {
  std::size_t prev_a = 0;
  std::size_t prev_b = 0;
  for (std::size_t t = 0;; ++t) {
    const auto ba = ball(a, t);
    const auto bb = ball(b, t);
    if (canonicalize(ba) != canonicalize(bb)) return LocalDistance{t - 1};
    const std::size_t sa = ba.graph.materialized_count();
    const std::size_t sb = bb.graph.materialized_count();
    // Both balls stopped growing: they are the full (isomorphic) components.
    if (t > 0 && sa == prev_a && sb == prev_b) return LocalDistance{std::nullopt};
    prev_a = sa;
    prev_b = sb;
  }
}

double NeighborhoodDistribution::frequency(const CanonicalForm& c) const {
  auto it = counts.find(c);
  if (it == counts.end() || total == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

void accumulate_measure(NeighborhoodDistribution& into, const WeightedGraph& g,
                        std::span<const VertexId> roots, std::uint64_t isolated_roots,
                        const MeasureOptions& options) {
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, roots.size()));
  std::vector<Tally> parts(threads);
  if (threads == 1) {
    tally_roots(parts[0], g, roots, into.depth, options.keep_representatives);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (roots.size() + threads - 1) / threads;
    for (std::size_t i = 0; i < threads; ++i) {
      const std::size_t lo = std::min(roots.size(), i * chunk);
      const std::size_t hi = std::min(roots.size(), lo + chunk);
      pool.emplace_back([&, i, lo, hi] {
        tally_roots(parts[i], g, roots.subspan(lo, hi - lo), into.depth,
                    options.keep_representatives);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& part : parts) {
    for (const auto& [form, count] : part.counts) into.counts[form] += count;
    for (auto& [form, rep] : part.reps) {
      if (!into.representatives.count(form)) into.representatives.emplace(form, std::move(rep.second));
    }
  }
  into.total += roots.size();
  if (isolated_roots > 0) {
    const CanonicalForm iso = isolated_root_form();
    into.counts[iso] += isolated_roots;
    into.total += isolated_roots;
    if (options.keep_representatives && !into.representatives.count(iso)) {
      into.representatives.emplace(iso, RootedWeightedGraph{WeightedGraph(1, {}), 0});
    }
  }
}

NeighborhoodDistribution empirical_measure(const WeightedGraph& g, std::size_t depth,
                                           const MeasureOptions& options) {
  NeighborhoodDistribution dist;
  dist.depth = depth;
  std::vector<VertexId> roots(g.materialized_count());
  for (VertexId v = 0; v < roots.size(); ++v) roots[v] = v;
  accumulate_measure(dist, g, roots, g.isolated_padding(), options);
  return dist;
}

void merge_into(NeighborhoodDistribution& into, const NeighborhoodDistribution& from) {
  if (into.depth != from.depth) throw std::invalid_argument("cannot merge measures of different depth");
  for (const auto& [form, count] : from.counts) into.counts[form] += count;
  for (const auto& [form, rep] : from.representatives) {
    if (!into.representatives.count(form)) into.representatives.emplace(form, rep);
  }
  into.total += from.total;
}

double total_variation(const NeighborhoodDistribution& a, const NeighborhoodDistribution& b,
                       std::uint64_t min_pooled) {
  if (a.total == 0 || b.total == 0) throw std::invalid_argument("empty neighborhood distribution");
  const double na = static_cast<double>(a.total);
  const double nb = static_cast<double>(b.total);
  double tv = 0.0;
  double other_a = 0.0;
  double other_b = 0.0;
  auto visit = [&](const CanonicalForm& form, std::uint64_t ca, std::uint64_t cb) {
    if (ca + cb < min_pooled) {
      other_a += static_cast<double>(ca);
      other_b += static_cast<double>(cb);
    } else {
      tv += std::abs(static_cast<double>(ca) / na - static_cast<double>(cb) / nb);
    }
    (void)form;
  };
  for (const auto& [form, ca] : a.counts) {
    auto it = b.counts.find(form);
    visit(form, ca, it == b.counts.end() ? 0 : it->second);
  }
  for (const auto& [form, cb] : b.counts) {
    if (!a.counts.count(form)) visit(form, 0, cb);
  }
  tv += std::abs(other_a / na - other_b / nb);
  return 0.5 * tv;
}

MassTransportResult mass_transport_check(const WeightedGraph& g, const EdgeFunctional& f,
                                         double relative_tolerance) {
  long double out_sum = 0.0L;
  long double in_sum = 0.0L;
  for (VertexId o = 0; o < g.materialized_count(); ++o) {
    for (const auto& nb : g.neighbors(o)) {
      const double forward = f(g, o, nb.to);
      const double backward = f(g, nb.to, o);
      if (forward < 0.0 || backward < 0.0 || std::isnan(forward) || std::isnan(backward)) {
        throw std::invalid_argument("edge functional must be nonnegative");
      }
      out_sum += forward;
      in_sum += backward;
    }
  }
  MassTransportResult result;
  const long double n = static_cast<long double>(std::max<std::uint64_t>(1, g.vertex_count()));
  result.outgoing = static_cast<double>(out_sum / n);
  result.incoming = static_cast<double>(in_sum / n);
  const double scale = std::max(std::abs(result.outgoing), std::abs(result.incoming));
  result.balanced = std::abs(result.outgoing - result.incoming) <= relative_tolerance * scale;
  return result;
}

}  // namespace hyperlocal
