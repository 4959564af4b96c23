#include <algorithm>
#include <string>

#include "deanon/errors.hpp"
#include "deanon/pgm.hpp"
#include "deanon/random.hpp"

namespace deanon {

std::vector<VertexPair> select_seeds(const ObservedPair& pair, const SeedPolicy& policy) {
  const std::size_t n = pair.num_vertices();
  if (policy.mode == SeedMode::explicit_list) return normalize_seeds(policy.pairs, n, n);

  std::vector<VertexId> eligible;
  eligible.reserve(n);
  for (VertexId a = 0; a < n; ++a) {
    if (policy.mode == SeedMode::degree_window) {
      const std::size_t d = pair.g1.degree(a);
      if (d < policy.degree_lo || d > policy.degree_hi) continue;
    }
    eligible.push_back(a);
  }
  if (policy.count > eligible.size()) {
    throw ParameterError("requested " + std::to_string(policy.count) + " seeds but only " +
                         std::to_string(eligible.size()) + " good pairs are eligible");
  }

  // Partial Fisher-Yates: the first `count` slots become a uniform sample.
  Rng rng(policy.rng_seed);
  for (std::size_t i = 0; i < policy.count; ++i) {
    const std::size_t j = i + pick_index(rng, eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  std::vector<VertexPair> seeds;
  seeds.reserve(policy.count);
  for (std::size_t i = 0; i < policy.count; ++i) {
    seeds.push_back({eligible[i], pair.truth[eligible[i]]});
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

}  // namespace deanon
