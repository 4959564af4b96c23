#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "deanon/graph.hpp"
#include "deanon/sampling.hpp"

namespace deanon {

enum class GraphFormat {
  automatic,  // by extension: ".bin" is a binary cache, anything else text
  edge_list,  // SNAP-style whitespace separated "u v" lines
  binary_cache,
};

struct LoadedGraph {
  Graph graph;
  // original_ids[v] is the id the file used for dense vertex v.
  std::vector<std::int64_t> original_ids;
  EdgeDropCounts dropped;
};

// Parses a SNAP-style edge list. Lines starting with '#' are comments; a
// "# Nodes: N" comment whose N covers every id keeps ids as-is (so isolated
// vertices survive a save/load cycle). Otherwise ids are re-indexed densely
// in ascending order. Columns after the first two are ignored. Throws
// DataError with the line number on a malformed line, and on empty input.
LoadedGraph read_edge_list(std::istream& in);
void write_edge_list(const Graph& graph, std::ostream& out);

// Binary cache layout (all integers little-endian):
//   magic "DNGC" | u32 version=1 | u32 flags (bit0: weights) | u32 reserved
//   u64 n | u64 nnz | u64 offsets[n+1] | u32 neighbors[nnz] | f64 weights[n]?
Graph read_graph_cache(std::istream& in);
void write_graph_cache(const Graph& graph, std::ostream& out);

LoadedGraph load_graph(const std::filesystem::path& path, GraphFormat format = GraphFormat::automatic);
void save_graph(const Graph& graph, const std::filesystem::path& path,
                GraphFormat format = GraphFormat::automatic);

// Observed pair as three files: <prefix>.g1.bin, <prefix>.g2.bin and
// <prefix>.truth.csv (header "g1_id,g2_id", preceded by "# s=<value>").
void save_observed_pair(const ObservedPair& pair, const std::string& prefix);
ObservedPair load_observed_pair(const std::string& prefix);

}  // namespace deanon
