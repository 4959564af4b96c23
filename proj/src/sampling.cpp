#include "deanon/sampling.hpp"

#include <numeric>

#include "deanon/errors.hpp"
#include "deanon/random.hpp"

namespace deanon {

std::vector<VertexId> ObservedPair::inverse_truth() const {
  std::vector<VertexId> inv(truth.size());
  for (std::size_t a = 0; a < truth.size(); ++a) inv[truth[a]] = static_cast<VertexId>(a);
  return inv;
}

ObservedPair sample_observed_pair(const Graph& ground, double s, std::uint64_t rng_seed) {
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("sampling probability must lie in [0, 1]");
  const std::size_t n = ground.num_vertices();
  Rng rng(rng_seed);

  std::vector<Edge> kept1;
  std::vector<Edge> kept2;
  kept1.reserve(static_cast<std::size_t>(static_cast<double>(ground.num_edges()) * s * 1.05) + 8);
  kept2.reserve(kept1.capacity());
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v : ground.neighbors(u)) {
      if (v <= u) continue;
      if (bernoulli(rng, s)) kept1.push_back({u, v});
      if (bernoulli(rng, s)) kept2.push_back({u, v});
    }
  }

  // Fisher-Yates on pick_index keeps the permutation independent of the
  // standard library's shuffle implementation.
  std::vector<VertexId> perm(n);
  std::iota(perm.begin(), perm.end(), VertexId{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[pick_index(rng, i)]);
  }
  for (auto& e : kept2) e = {perm[e.u], perm[e.v]};

  ObservedPair out;
  out.s = s;
  out.truth = perm;
  out.g1 = Graph::from_edges(n, kept1);
  out.g2 = Graph::from_edges(n, kept2);
  if (ground.has_weights()) {
    auto w = ground.weights();
    std::vector<double> w2(n);
    for (std::size_t a = 0; a < n; ++a) w2[perm[a]] = w[a];
    out.g1 = out.g1.with_weights({w.begin(), w.end()});
    out.g2 = out.g2.with_weights(std::move(w2));
  }
  return out;
}

}  // namespace deanon
