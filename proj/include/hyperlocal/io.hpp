#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hyperlocal/gw_sampler.hpp"
#include "hyperlocal/hypergraph.hpp"
#include "hyperlocal/line_graph.hpp"
#include "hyperlocal/local_topology.hpp"

namespace hyperlocal {

using Json = nlohmann::ordered_json;

/// {"n": .., "k": .., "edges": [[..], ..]}
Json hypergraph_to_json(const Hypergraph& h);
/// Inverse of hypergraph_to_json; validates through the Hypergraph constructor.
Hypergraph hypergraph_from_json(const Json& j);

/// {"r", "vertex_count", "isolated_padding", "labels": [[..]], "edges": [[u, v, w]]}
Json line_graph_to_json(const LineGraph& lg);

/// {"root", "vertex_count", "isolated_padding", "edges": [[u, v, w]]}
Json rooted_graph_to_json(const RootedWeightedGraph& g);

/// {"d", "root": 0, "vertices": [{"id", "address", "generation", "parent",
/// "neighbors"}]} with vertices in id order.
Json block_tree_to_json(const BlockTreeSample& s);

/// hash,count,frequency rows ordered by canonical code.
std::string distribution_csv(const NeighborhoodDistribution& d);
/// hash -> {"code", "representative"} for every class with a representative.
Json distribution_sidecar(const NeighborhoodDistribution& d);

/// Writes to a temporary file in the same directory, then renames it over
/// `path`. Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Shortest decimal text that reads back as the same double.
std::string format_double(double x);

}  // namespace hyperlocal
