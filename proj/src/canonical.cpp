#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyperlocal/local_topology.hpp"

namespace hyperlocal {

namespace {

// Adjacency of one connected component with local ids 0..c-1, root 0.
struct Component {
  std::vector<std::vector<Neighbor>> adj;  // sorted by `to`

  std::size_t size() const { return adj.size(); }

  Weight weight(std::uint32_t u, std::uint32_t v) const {
    const auto& list = adj[u];
    auto it = std::lower_bound(list.begin(), list.end(), v,
                               [](const Neighbor& n, std::uint32_t x) { return n.to < x; });
    return (it != list.end() && it->to == v) ? it->weight : 0;
  }
};

// Component of `start` in `g`, relabelled in BFS order (start -> 0).
Component extract_component(const WeightedGraph& g, VertexId start,
                            std::vector<std::uint32_t>& local, std::vector<VertexId>& order) {
  order.clear();
  order.push_back(start);
  local[start] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& nb : g.neighbors(order[i])) {
      if (local[nb.to] == UINT32_MAX) {
        local[nb.to] = static_cast<std::uint32_t>(order.size());
        order.push_back(nb.to);
      }
    }
  }
  Component c;
  c.adj.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& nb : g.neighbors(order[i])) c.adj[i].push_back({local[nb.to], nb.weight});
    std::sort(c.adj[i].begin(), c.adj[i].end(),
              [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
  }
  return c;
}

// Biconnected blocks by an iterative Tarjan edge-stack walk from vertex 0.
std::vector<std::vector<std::uint32_t>> biconnected_blocks(const Component& c) {
  const std::size_t n = c.size();
  std::vector<std::vector<std::uint32_t>> blocks;
  if (n == 1) return blocks;
  std::vector<std::uint32_t> disc(n, 0), low(n, 0), parent(n, UINT32_MAX), next_edge(n, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_stack;
  std::vector<std::uint32_t> stack{0};
  std::uint32_t timer = 1;
  disc[0] = low[0] = timer++;
  while (!stack.empty()) {
    const std::uint32_t u = stack.back();
    if (next_edge[u] < c.adj[u].size()) {
      const std::uint32_t v = c.adj[u][next_edge[u]++].to;
      if (disc[v] == 0) {
        parent[v] = u;
        disc[v] = low[v] = timer++;
        edge_stack.emplace_back(u, v);
        stack.push_back(v);
      } else if (v != parent[u] && disc[v] < disc[u]) {
        low[u] = std::min(low[u], disc[v]);
        edge_stack.emplace_back(u, v);
      }
      continue;
    }
    stack.pop_back();
    if (stack.empty()) break;
    const std::uint32_t p = parent[u];
    low[p] = std::min(low[p], low[u]);
    if (low[u] >= disc[p]) {
      std::vector<std::uint32_t> block;
      while (true) {
        const auto e = edge_stack.back();
        edge_stack.pop_back();
        block.push_back(e.first);
        block.push_back(e.second);
        if (e.first == p && e.second == u) break;
      }
      std::sort(block.begin(), block.end());
      block.erase(std::unique(block.begin(), block.end()), block.end());
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

void append_int(std::string& out, long long value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%lld", value);
  out.append(buf, static_cast<std::size_t>(len));
}

// Canonical labelling of one general block by individualization-refinement.
class BlockLabeller {
 public:
  BlockLabeller(std::vector<std::vector<Weight>> w, std::vector<int> colours)
      : w_(std::move(w)), initial_(std::move(colours)) {}

  std::vector<long long> run() {
    search(refine(initial_));
    return best_;
  }

 private:
  std::vector<int> refine(std::vector<int> colours) const {
    const std::size_t n = w_.size();
    std::size_t classes = count_classes(colours);
    while (true) {
      std::vector<std::pair<std::vector<long long>, std::uint32_t>> sig(n);
      for (std::uint32_t v = 0; v < n; ++v) {
        std::vector<std::pair<int, Weight>> nbrs;
        for (std::uint32_t u = 0; u < n; ++u) {
          if (w_[v][u] != 0) nbrs.emplace_back(colours[u], w_[v][u]);
        }
        std::sort(nbrs.begin(), nbrs.end());
        auto& s = sig[v].first;
        s.push_back(colours[v]);
        for (const auto& [col, wt] : nbrs) {
          s.push_back(col);
          s.push_back(wt);
        }
        sig[v].second = v;
      }
      std::vector<std::pair<std::vector<long long>, std::uint32_t>> sorted = sig;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> next(n);
      int rank = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || sorted[i].first != sorted[i - 1].first) ++rank;
        next[sorted[i].second] = rank;
      }
      const std::size_t next_classes = static_cast<std::size_t>(rank) + 1;
      colours = std::move(next);
      if (next_classes == classes) return colours;
      classes = next_classes;
    }
  }

  static std::size_t count_classes(const std::vector<int>& colours) {
    std::vector<int> c = colours;
    std::sort(c.begin(), c.end());
    return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
  }

  bool twins(std::uint32_t a, std::uint32_t b) const {
    for (std::uint32_t x = 0; x < w_.size(); ++x) {
      if (x == a || x == b) continue;
      if (w_[a][x] != w_[b][x]) return false;
    }
    return true;
  }

  void search(const std::vector<int>& colours) {
    const std::size_t n = w_.size();
    std::map<int, std::vector<std::uint32_t>> cells;
    for (std::uint32_t v = 0; v < n; ++v) cells[colours[v]].push_back(v);
    const std::vector<std::uint32_t>* target = nullptr;
    for (const auto& [col, members] : cells) {
      if (members.size() > 1) {
        target = &members;
        break;
      }
    }
    if (target == nullptr) {
      leaf(colours);
      return;
    }
    std::vector<std::uint32_t> representatives;
    for (std::uint32_t v : *target) {
      bool covered = false;
      for (std::uint32_t r : representatives) {
        if (twins(r, v)) {
          covered = true;
          break;
        }
      }
      if (!covered) representatives.push_back(v);
    }
    for (std::uint32_t v : representatives) {
      std::vector<int> split(n);
      for (std::uint32_t x = 0; x < n; ++x) split[x] = 2 * colours[x] + (x == v ? 0 : 1);
      search(refine(std::move(split)));
    }
  }

  void leaf(const std::vector<int>& colours) {
    const std::size_t n = w_.size();
    std::vector<std::uint32_t> at(n);
    for (std::uint32_t v = 0; v < n; ++v) at[static_cast<std::size_t>(colours[v])] = v;
    std::vector<long long> cert;
    cert.reserve(n + n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) cert.push_back(initial_[at[i]]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) cert.push_back(w_[at[i]][at[j]]);
    }
    if (best_.empty() || cert < best_) best_ = std::move(cert);
  }

  std::vector<std::vector<Weight>> w_;
  std::vector<int> initial_;
  std::vector<long long> best_;
};

// Rooted code of a connected component, root = local vertex 0.
std::string rooted_code(const Component& c) {
  const std::size_t n = c.size();
  if (n == 1) return "()";
  const auto blocks = biconnected_blocks(c);
  std::vector<std::vector<std::uint32_t>> blocks_of(n);
  for (std::uint32_t b = 0; b < blocks.size(); ++b) {
    for (std::uint32_t v : blocks[b]) blocks_of[v].push_back(b);
  }

  // Block-cut tree hanging from the root: BFS over vertex and block nodes.
  std::vector<std::uint32_t> attach(blocks.size(), UINT32_MAX);
  std::vector<std::uint32_t> parent_block(n, UINT32_MAX);
  std::vector<std::vector<std::uint32_t>> child_blocks(n);
  std::vector<std::uint32_t> vertex_order{0};
  for (std::size_t i = 0; i < vertex_order.size(); ++i) {
    const std::uint32_t v = vertex_order[i];
    for (std::uint32_t b : blocks_of[v]) {
      if (b == parent_block[v]) continue;
      attach[b] = v;
      child_blocks[v].push_back(b);
      for (std::uint32_t u : blocks[b]) {
        if (u == v) continue;
        parent_block[u] = b;
        vertex_order.push_back(u);
      }
    }
  }

  std::vector<std::string> vcode(n);
  // Reverse BFS: children are always finished before their parents.
  for (std::size_t vi = vertex_order.size(); vi-- > 0;) {
    const std::uint32_t v = vertex_order[vi];
    std::vector<std::string> parts;
    for (std::uint32_t b : child_blocks[v]) {
      const auto& members = blocks[b];
      std::string code;
      if (members.size() == 2) {
        const std::uint32_t u = members[0] == v ? members[1] : members[0];
        code = "b";
        append_int(code, c.weight(v, u));
        code += vcode[u];
      } else {
        const Weight w0 = c.weight(members[0], members[1]);
        bool uniform = true;
        for (std::size_t i = 0; i < members.size() && uniform; ++i) {
          for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (c.weight(members[i], members[j]) != w0) {
              uniform = false;
              break;
            }
          }
        }
        std::vector<std::string> children;
        for (std::uint32_t u : members) {
          if (u != v) children.push_back(vcode[u]);
        }
        std::sort(children.begin(), children.end());
        if (uniform) {
          code = "k";
          append_int(code, w0);
          code += '[';
          for (const auto& s : children) code += s;
          code += ']';
        } else {
          std::vector<std::string> distinct = children;
          distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
          const std::size_t m = members.size();
          std::vector<std::vector<Weight>> w(m, std::vector<Weight>(m, 0));
          std::vector<int> colours(m);
          for (std::size_t i = 0; i < m; ++i) {
            const std::uint32_t u = members[i];
            colours[i] = u == v ? 0
                                : 1 + static_cast<int>(std::lower_bound(distinct.begin(),
                                                                        distinct.end(), vcode[u]) -
                                                       distinct.begin());
            for (std::size_t j = 0; j < m; ++j) {
              if (i != j) w[i][j] = c.weight(u, members[j]);
            }
          }
          const auto cert = BlockLabeller(std::move(w), std::move(colours)).run();
          code = "g{";
          for (const auto& s : distinct) code += s;
          code += '}';
          for (long long x : cert) {
            append_int(code, x);
            code += ',';
          }
          code += ';';
        }
      }
      parts.push_back(std::move(code));
    }
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (const auto& s : parts) out += s;
    out += ')';
    vcode[v] = std::move(out);
  }
  return vcode[0];
}

}  // namespace

std::uint64_t CanonicalForm::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : code) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string CanonicalForm::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

CanonicalForm canonicalize(const RootedWeightedGraph& g, std::size_t size_cap) {
  const WeightedGraph& graph = g.graph;
  const std::size_t n = graph.materialized_count();
  if (n > size_cap) throw std::length_error("graph exceeds the canonicalization size cap");
  if (n == 0 || g.root >= n) throw std::invalid_argument("root is not a materialized vertex");

  std::vector<std::uint32_t> local(n, UINT32_MAX);
  std::vector<VertexId> order;
  std::string code = "R";
  code += rooted_code(extract_component(graph, g.root, local, order));

  // Remaining components: minimum rooted code over the choice of root.
  std::map<std::string, std::uint64_t> others;
  std::vector<char> seen(n, 0);
  for (VertexId v : order) seen[v] = 1;
  std::vector<std::uint32_t> scratch(n, UINT32_MAX);
  for (VertexId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<VertexId> members;
    extract_component(graph, s, local, members);
    for (VertexId v : members) seen[v] = 1;
    std::string best;
    for (VertexId v : members) {
      std::vector<VertexId> sub;
      auto comp = extract_component(graph, v, scratch, sub);
      for (VertexId x : sub) scratch[x] = UINT32_MAX;
      auto rc = rooted_code(comp);
      if (best.empty() || rc < best) best = std::move(rc);
    }
    ++others[best];
  }
  if (graph.isolated_padding() > 0) others["()"] += graph.isolated_padding();
  for (const auto& [c, count] : others) {
    code += '+';
    code += c;
    code += '*';
    append_int(code, static_cast<long long>(count));
  }
  return CanonicalForm{std::move(code)};
}

bool are_isomorphic(const RootedWeightedGraph& a, const RootedWeightedGraph& b) {
  if (a.graph.vertex_count() != b.graph.vertex_count()) return false;
  if (a.graph.edge_count() != b.graph.edge_count()) return false;
  auto weights = [](const WeightedGraph& g) {
    std::vector<Weight> w;
    for (const auto& e : g.edges()) w.push_back(e.weight);
    std::sort(w.begin(), w.end());
    return w;
  };
  if (weights(a.graph) != weights(b.graph)) return false;
  return canonicalize(a) == canonicalize(b);
}

}  // namespace hyperlocal
