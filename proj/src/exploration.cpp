#include "hyperlocal/exploration.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hyperlocal {

namespace {

// Hyperedge indices containing every member of `s`, increasing.
std::vector<std::uint32_t> star_of(const Hypergraph& h,
                                   const std::vector<std::vector<std::uint32_t>>& incidence,
                                   const RSet& s) {
  const auto members = s.members();
  const auto* smallest = &incidence[static_cast<std::size_t>(members[0])];
  for (Vertex v : members) {
    const auto& list = incidence[static_cast<std::size_t>(v)];
    if (list.size() < smallest->size()) smallest = &list;
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t e : *smallest) {
    const auto& edge = h.edges()[e];
    if (std::includes(edge.begin(), edge.end(), members.begin(), members.end())) out.push_back(e);
  }
  return out;
}

std::size_t intersection_size(const Hyperedge& a, const Hyperedge& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

ExplorationTrace explore(const Hypergraph& h, const RSet& root, ExploreOptions options) {
  const int r = static_cast<int>(root.size());
  if (r < 1 || r >= h.k()) throw std::invalid_argument("root cardinality must satisfy 1 <= r < k");
  for (Vertex v : root.members()) {
    if (v < 1 || v > h.n()) throw std::invalid_argument("root member outside [1..n]");
  }
  std::size_t max_steps = options.max_steps;
  if (max_steps == 0) {
    max_steps = static_cast<std::size_t>(binomial_u64(static_cast<std::uint64_t>(h.n()),
                                                      static_cast<std::uint64_t>(r)));
  }

  ExplorationTrace trace;
  trace.n = h.n();
  trace.k = h.k();
  trace.r = r;
  trace.root = root;

  const auto incidence = incidence_lists(h);
  std::vector<char> unexplored(static_cast<std::size_t>(h.n()) + 1, 1);
  std::size_t unexplored_count = static_cast<std::size_t>(h.n());
  std::vector<int> active_multiplicity(static_cast<std::size_t>(h.n()) + 1, 0);
  std::size_t active_vertices = 0;
  std::vector<char> edge_done(h.edge_count(), 0);
  std::size_t covered_edges = 0;
  std::set<RSet> discovered{root};
  std::deque<RSet> active{root};

  auto activate = [&](const RSet& s) {
    for (Vertex v : s.members()) {
      if (active_multiplicity[static_cast<std::size_t>(v)]++ == 0) ++active_vertices;
      if (unexplored[static_cast<std::size_t>(v)]) {
        unexplored[static_cast<std::size_t>(v)] = 0;
        --unexplored_count;
      }
    }
  };
  activate(root);

  std::size_t t = 0;
  while (!active.empty() && t < max_steps) {
    ++t;
    ExplorationStep step;
    step.t = t;
    step.explored = active.front();
    active.pop_front();
    for (Vertex v : step.explored.members()) {
      if (--active_multiplicity[static_cast<std::size_t>(v)] == 0) --active_vertices;
    }

    const auto star = star_of(h, incidence, step.explored);
    for (std::uint32_t e : star) {
      if (!edge_done[e]) step.fresh_edges.push_back(e);
    }
    step.y = static_cast<std::int64_t>(star.size()) - (t == 1 ? 0 : 1);
    step.z = static_cast<std::int64_t>(step.fresh_edges.size());
    step.y_neq_z = step.y != step.z;

    for (std::uint32_t e : step.fresh_edges) {
      std::size_t outside = 0;
      for (Vertex v : h.edges()[e]) outside += unexplored[static_cast<std::size_t>(v)] ? 0 : 1;
      if (outside > static_cast<std::size_t>(r)) step.edge_escapes = true;
    }
    for (std::size_t a = 0; a < step.fresh_edges.size() && !step.edge_overlap; ++a) {
      for (std::size_t b = a + 1; b < step.fresh_edges.size(); ++b) {
        if (intersection_size(h.edges()[step.fresh_edges[a]], h.edges()[step.fresh_edges[b]]) >
            static_cast<std::size_t>(r)) {
          step.edge_overlap = true;
          break;
        }
      }
    }

    std::vector<Vertex> spanned;
    for (std::uint32_t e : step.fresh_edges) {
      edge_done[e] = 1;
      ++covered_edges;
      for_each_subset(h.edges()[e], r, [&](std::span<const Vertex> sub) {
        RSet s(std::vector<Vertex>(sub.begin(), sub.end()));
        if (discovered.insert(s).second) {
          spanned.insert(spanned.end(), sub.begin(), sub.end());
          activate(s);
          active.push_back(s);
          step.discovered.push_back(std::move(s));
        }
      });
    }
    std::sort(spanned.begin(), spanned.end());
    spanned.erase(std::unique(spanned.begin(), spanned.end()), spanned.end());

    step.x = static_cast<std::int64_t>(step.discovered.size());
    step.new_vertices = spanned.size();
    step.active_rsets = active.size();
    step.active_vertices = active_vertices;
    step.unexplored_vertices = unexplored_count;
    step.covered = t;
    step.covered_edges = covered_edges;
    if (options.record_active_members) step.active_members.assign(active.begin(), active.end());
    trace.steps.push_back(std::move(step));
  }
  if (active.empty()) {
    trace.terminated_at = t;
  } else {
    trace.truncated = true;
  }
  return trace;
}

DeviationReport detect_deviations(const ExplorationTrace& trace, int r, std::size_t depth) {
  if (r != trace.r) throw std::invalid_argument("trace was produced with a different r");
  DeviationReport report;
  const std::size_t limit = std::min(trace.steps.size(), depth);
  report.within_depth = limit;
  auto mark = [](DeviationEvent& ev, bool hit, std::size_t t) {
    if (hit && !ev.occurred) {
      ev.occurred = true;
      ev.first_step = t;
    }
  };
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& step = trace.steps[i];
    mark(report.y_neq_z, step.y != step.z, step.t);
    mark(report.edge_escapes, step.edge_escapes, step.t);
    mark(report.edge_overlap, step.edge_overlap, step.t);
  }
  return report;
}

std::string trace_to_csv(const ExplorationTrace& trace) {
  std::ostringstream out;
  out << "t,A,U,C,R,X,Y,Z,flags\n";
  for (const auto& s : trace.steps) {
    std::string flags;
    auto add = [&](bool on, const char* tag) {
      if (!on) return;
      if (!flags.empty()) flags += '|';
      flags += tag;
    };
    add(s.y_neq_z, "Y");
    add(s.edge_escapes, "E");
    add(s.edge_overlap, "O");
    out << s.t << ',' << s.active_rsets << ',' << s.unexplored_vertices << ',' << s.covered << ','
        << s.fresh_edges.size() << ',' << s.x << ',' << s.y << ',' << s.z << ',' << flags << '\n';
  }
  return out.str();
}

}  // namespace hyperlocal
