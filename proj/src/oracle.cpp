#include "deanon/oracle.hpp"

#include <algorithm>

#include "deanon/errors.hpp"
#include "deanon/random.hpp"

namespace deanon::oracle {

std::size_t ExplicitPairsGraph::num_edges() const noexcept {
  std::size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return twice / 2;
}

ExplicitPairsGraph build_pairs_graph(const Graph& g1, const Graph& g2) {
  if (g1.num_vertices() > kMaxVertices || g2.num_vertices() > kMaxVertices) {
    throw ParameterError("explicit pairs graph refused above " + std::to_string(kMaxVertices) +
                         " vertices");
  }
  ExplicitPairsGraph g;
  g.n1 = g1.num_vertices();
  g.n2 = g2.num_vertices();
  g.adjacency.resize(g.n1 * g.n2);
  for (std::size_t i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < g.n2; ++j) {
      auto& adj = g.adjacency[i * g.n2 + j];
      for (std::size_t k = 0; k < g.n1; ++k) {
        if (!g1.has_edge(static_cast<VertexId>(i), static_cast<VertexId>(k))) continue;
        for (std::size_t l = 0; l < g.n2; ++l) {
          if (g2.has_edge(static_cast<VertexId>(j), static_cast<VertexId>(l))) {
            adj.push_back(k * g.n2 + l);
          }
        }
      }
    }
  }
  return g;
}

std::vector<VertexPair> run_pgm_reference(const ExplicitPairsGraph& g,
                                          std::span<const VertexPair> seeds, std::uint32_t r,
                                          std::uint64_t rng_seed, FrontierOrder order) {
  if (r < 1) throw ParameterError("threshold must be >= 1");
  std::vector<VertexPair> initial(seeds.begin(), seeds.end());
  std::sort(initial.begin(), initial.end());
  initial.erase(std::unique(initial.begin(), initial.end()), initial.end());

  std::vector<char> used1(g.n1, 0);
  std::vector<char> used2(g.n2, 0);
  std::vector<std::uint32_t> marks(g.n1 * g.n2, 0);
  std::vector<std::size_t> frontier;  // pending = frontier[head..]
  std::vector<VertexPair> matched;
  auto conflicts = [&](VertexPair p) { return used1[p.a] || used2[p.b]; };
  auto match = [&](VertexPair p) {
    used1[p.a] = used2[p.b] = 1;
    matched.push_back(p);
    frontier.push_back(g.index(p));
  };
  for (VertexPair p : initial) {
    if (p.a >= g.n1 || p.b >= g.n2 || conflicts(p)) throw ParameterError("invalid seed set");
    match(p);
  }

  Rng rng(rng_seed);
  std::size_t head = 0;
  while (head < frontier.size()) {
    if (order == FrontierOrder::uniform_random) {
      const std::size_t pick = head + pick_index(rng, frontier.size() - head);
      std::swap(frontier[head], frontier[pick]);
    }
    const std::size_t current = frontier[head++];
    std::vector<std::size_t> reached;
    for (std::size_t nb : g.adjacency[current]) {
      if (++marks[nb] == r) reached.push_back(nb);
    }
    std::sort(reached.begin(), reached.end());
    for (std::size_t idx : reached) {
      const VertexPair p = g.pair_at(idx);
      if (!conflicts(p)) match(p);
    }
  }
  std::sort(matched.begin(), matched.end());
  return matched;
}

std::size_t boundary_edges_reference(const ExplicitPairsGraph& g,
                                     std::span<const VertexPair> seeds) {
  std::vector<char> is_seed(g.n1 * g.n2, 0);
  for (VertexPair p : seeds) is_seed[g.index(p)] = 1;
  std::size_t count = 0;
  for (std::size_t u = 0; u < g.adjacency.size(); ++u) {
    for (std::size_t v : g.adjacency[u]) {
      if (is_seed[u] && !is_seed[v]) ++count;
    }
  }
  return count;
}

}  // namespace deanon::oracle
