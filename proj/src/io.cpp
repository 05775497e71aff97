#include "hyperlocal/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hyperlocal {

namespace {

Json edge_list(const WeightedGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back(Json::array({e.u, e.v, e.weight}));
  return edges;
}

}  // namespace

Json hypergraph_to_json(const Hypergraph& h) {
  Json j;
  j["n"] = h.n();
  j["k"] = h.k();
  Json edges = Json::array();
  for (const auto& e : h.edges()) edges.push_back(e);
  j["edges"] = std::move(edges);
  return j;
}

Hypergraph hypergraph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("k") || !j.contains("edges")) {
    throw std::invalid_argument("hypergraph JSON needs n, k and edges");
  }
  std::vector<Hyperedge> edges;
  for (const auto& e : j.at("edges")) edges.push_back(e.get<Hyperedge>());
  return Hypergraph(j.at("n").get<int>(), j.at("k").get<int>(), std::move(edges));
}

Json line_graph_to_json(const LineGraph& lg) {
  Json j;
  j["r"] = lg.r;
  j["vertex_count"] = lg.graph.vertex_count();
  j["isolated_padding"] = lg.graph.isolated_padding();
  Json labels = Json::array();
  for (const auto& s : lg.labels) labels.push_back(std::vector<Vertex>(s.members().begin(), s.members().end()));
  j["labels"] = std::move(labels);
  j["edges"] = edge_list(lg.graph);
  return j;
}

Json rooted_graph_to_json(const RootedWeightedGraph& g) {
  Json j;
  j["root"] = g.root;
  j["vertex_count"] = g.graph.vertex_count();
  j["isolated_padding"] = g.graph.isolated_padding();
  j["edges"] = edge_list(g.graph);
  return j;
}

Json block_tree_to_json(const BlockTreeSample& s) {
  Json j;
  j["d"] = s.d;
  j["root"] = s.tree.root;
  Json vertices = Json::array();
  for (VertexId v = 0; v < s.size(); ++v) {
    Json item;
    item["id"] = v;
    Json address = Json::array();
    for (const auto& [block, within] : s.addresses[v]) address.push_back(Json::array({block, within}));
    item["address"] = std::move(address);
    item["generation"] = s.generation[v];
    if (v == s.tree.root) {
      item["parent"] = nullptr;
    } else {
      item["parent"] = s.parent[v];
    }
    Json nbrs = Json::array();
    for (const auto& nb : s.tree.graph.neighbors(v)) nbrs.push_back(nb.to);
    item["neighbors"] = std::move(nbrs);
    vertices.push_back(std::move(item));
  }
  j["vertices"] = std::move(vertices);
  return j;
}

std::string distribution_csv(const NeighborhoodDistribution& d) {
  std::ostringstream out;
  out << "hash,count,frequency\n";
  for (const auto& [form, count] : d.counts) {
    out << form.hex() << ',' << count << ','
        << format_double(static_cast<double>(count) / static_cast<double>(d.total)) << '\n';
  }
  return out.str();
}

Json distribution_sidecar(const NeighborhoodDistribution& d) {
  Json j = Json::object();
  for (const auto& [form, rep] : d.representatives) {
    Json item;
    item["code"] = form.code;
    item["representative"] = rooted_graph_to_json(rep);
    j[form.hex()] = std::move(item);
  }
  return j;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace hyperlocal
