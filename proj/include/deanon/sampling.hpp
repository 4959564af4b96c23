#pragma once

#include <cstdint>
#include <vector>

#include "deanon/graph.hpp"

namespace deanon {

// Two independently edge-sampled views of one groundtruth graph.
//
// g1 keeps groundtruth labels; g2 is relabeled by a uniform random
// permutation. truth[a] is the g2 label of g1 vertex a. If the groundtruth
// carried weights, both views carry them under their own labels (hidden
// information used only by the harness and true-weight slicing).
struct ObservedPair {
  Graph g1;
  Graph g2;
  std::vector<VertexId> truth;
  double s = 1.0;

  std::size_t num_vertices() const noexcept { return g1.num_vertices(); }
  // g1 label of every g2 vertex.
  std::vector<VertexId> inverse_truth() const;
};

// Keeps every groundtruth edge in g1 with probability s and, independently,
// in g2 with probability s, then permutes g2's labels.
ObservedPair sample_observed_pair(const Graph& ground, double s, std::uint64_t rng_seed);

}  // namespace deanon
