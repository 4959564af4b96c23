#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "deanon/pgm.hpp"
#include "deanon/sampling.hpp"

namespace deanon::oracle {

// Dense pairs graph over all n1*n2 ordered pairs. Pair [i, j] has index
// i*n2 + j; [i, j] ~ [k, l] iff (i, k) is an edge of g1 and (j, l) of g2.
struct ExplicitPairsGraph {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t index(VertexPair p) const noexcept { return std::size_t{p.a} * n2 + p.b; }
  VertexPair pair_at(std::size_t idx) const noexcept {
    return {static_cast<VertexId>(idx / n2), static_cast<VertexId>(idx % n2)};
  }
  // Each undirected edge counted once.
  std::size_t num_edges() const noexcept;
};

inline constexpr std::size_t kMaxVertices = 200;

// Throws ParameterError when either graph has more than kMaxVertices vertices.
ExplicitPairsGraph build_pairs_graph(const Graph& g1, const Graph& g2);
inline ExplicitPairsGraph build_pairs_graph(const ObservedPair& pair) {
  return build_pairs_graph(pair.g1, pair.g2);
}

// Straight transcription of the matching loop over the explicit graph, with
// a counter for every pair. Uses the same pair-selection rule and random
// stream as run_pgm, so the two must agree exactly. Returns the matched
// pairs sorted.
std::vector<VertexPair> run_pgm_reference(const ExplicitPairsGraph& g,
                                          std::span<const VertexPair> seeds, std::uint32_t r,
                                          std::uint64_t rng_seed,
                                          FrontierOrder order = FrontierOrder::uniform_random);

// Edges of the pairs graph with exactly one endpoint in the seed set.
std::size_t boundary_edges_reference(const ExplicitPairsGraph& g,
                                     std::span<const VertexPair> seeds);

}  // namespace deanon::oracle
