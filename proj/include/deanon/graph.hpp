#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace deanon {

using VertexId = std::uint32_t;

struct Edge {
  VertexId u;
  VertexId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Counts of records discarded while normalizing an edge list.
struct EdgeDropCounts {
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
};

// Undirected simple graph in compressed sparse row form.
//
// Every vertex owns a sorted, duplicate-free neighbor list; adjacency is
// symmetric and loop-free. Optionally carries one weight per vertex (the
// expected degree it was generated with). Immutable after construction, so a
// Graph can be shared read-only across threads.
class Graph {
 public:
  Graph() = default;

  // Builds from an arbitrary edge list, dropping self-loops and repeated
  // edges (in either orientation). Endpoints must be < n.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                          EdgeDropCounts* dropped = nullptr);

  // Adopts CSR arrays after validating every structural invariant.
  static Graph from_csr(std::vector<std::uint64_t> offsets, std::vector<VertexId> neighbors,
                        std::vector<double> weights = {});

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const VertexId> neighbors(VertexId v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const noexcept {
    return static_cast<std::size_t>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_edge(VertexId u, VertexId v) const noexcept;

  bool has_weights() const noexcept { return !weights_.empty(); }
  std::span<const double> weights() const noexcept { return weights_; }

  // Same topology with the given per-vertex weights attached.
  Graph with_weights(std::vector<double> weights) const;

  std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
  std::span<const VertexId> neighbor_array() const noexcept { return neighbors_; }

  // Edges with u < v, ordered by (u, v).
  std::vector<Edge> edges() const;
  std::vector<std::size_t> degrees() const;
  double mean_degree() const noexcept;

  // Throws std::logic_error naming the first violated invariant.
  void check_invariants() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<VertexId> neighbors_;
  std::vector<double> weights_;
};

}  // namespace deanon
