#include "deanon/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "deanon/errors.hpp"

namespace deanon {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges, EdgeDropCounts* dropped) {
  if (n >= static_cast<std::size_t>(UINT32_MAX)) {
    throw ParameterError("vertex count exceeds 32-bit id space");
  }
  EdgeDropCounts counts;
  std::vector<std::uint64_t> degree(n + 1, 0);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw ParameterError("edge endpoint " + std::to_string(std::max(e.u, e.v)) +
                           " out of range for n=" + std::to_string(n));
    }
    if (e.u == e.v) {
      ++counts.self_loops;
      continue;
    }
    ++degree[e.u];
    ++degree[e.v];
  }

  Graph g;
  g.n_ = n;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    g.neighbors_[cursor[e.u]++] = e.v;
    g.neighbors_[cursor[e.v]++] = e.u;
  }

  // Sort and dedup each list, then compact.
  std::size_t write = 0;
  std::uint64_t begin = 0;
  std::size_t removed_slots = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const std::uint64_t end = g.offsets_[v + 1];
    auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(begin);
    auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(end);
    std::sort(first, last);
    auto unique_end = std::unique(first, last);
    const auto kept = static_cast<std::size_t>(unique_end - first);
    removed_slots += static_cast<std::size_t>(end - begin) - kept;
    std::move(first, unique_end, g.neighbors_.begin() + static_cast<std::ptrdiff_t>(write));
    begin = end;
    g.offsets_[v] = write;
    write += kept;
  }
  g.offsets_[n] = write;
  g.neighbors_.resize(write);
  g.neighbors_.shrink_to_fit();
  counts.duplicates = removed_slots / 2;
  if (dropped) *dropped = counts;
  return g;
}

Graph Graph::from_csr(std::vector<std::uint64_t> offsets, std::vector<VertexId> neighbors,
                      std::vector<double> weights) {
  if (offsets.empty()) throw DataError("CSR offsets must hold at least one entry");
  Graph g;
  g.n_ = offsets.size() - 1;
  g.offsets_ = std::move(offsets);
  g.neighbors_ = std::move(neighbors);
  g.weights_ = std::move(weights);
  if (!g.weights_.empty() && g.weights_.size() != g.n_) {
    throw DataError("weight array length does not match vertex count");
  }
  try {
    g.check_invariants();
  } catch (const std::logic_error& e) {
    throw DataError(std::string("invalid CSR graph: ") + e.what());
  }
  return g;
}

bool Graph::has_edge(VertexId u, VertexId v) const noexcept {
  if (u >= n_ || v >= n_) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Graph Graph::with_weights(std::vector<double> weights) const {
  if (!weights.empty() && weights.size() != n_) {
    throw ParameterError("weight array length does not match vertex count");
  }
  Graph g = *this;
  g.weights_ = std::move(weights);
  return g;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (VertexId u = 0; u < n_; ++u) {
    for (VertexId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(n_);
  for (VertexId v = 0; v < n_; ++v) d[v] = degree(v);
  return d;
}

double Graph::mean_degree() const noexcept {
  return n_ == 0 ? 0.0 : static_cast<double>(neighbors_.size()) / static_cast<double>(n_);
}

void Graph::check_invariants() const {
  if (offsets_.size() != n_ + 1) throw std::logic_error("offset array length != n+1");
  if (offsets_.front() != 0 || offsets_.back() != neighbors_.size()) {
    throw std::logic_error("offset array does not span the neighbor array");
  }
  for (VertexId v = 0; v < n_; ++v) {
    if (offsets_[v] > offsets_[v + 1]) throw std::logic_error("offsets not monotone");
    auto nb = neighbors(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const VertexId w = nb[i];
      if (w >= n_) throw std::logic_error("neighbor id out of range");
      if (w == v) throw std::logic_error("self-loop at vertex " + std::to_string(v));
      if (i > 0 && nb[i - 1] >= w) {
        throw std::logic_error("neighbor list of " + std::to_string(v) +
                               " not strictly ascending");
      }
      if (!has_edge(w, v)) {
        throw std::logic_error("asymmetric edge " + std::to_string(v) + "-" +
                               std::to_string(w));
      }
    }
  }
}

}  // namespace deanon
