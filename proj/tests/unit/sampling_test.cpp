#include <doctest.h>

#include <cmath>
#include <vector>

#include "deanon/errors.hpp"
#include "deanon/sampling.hpp"
#include "test_support.hpp"

using namespace deanon;

namespace {

// Circulant graph on 200 vertices with 10^4 edges.
Graph circulant_10k() {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < 200; ++i) {
    for (VertexId k = 1; k <= 50; ++k) edges.push_back({i, (i + k) % 200});
  }
  return Graph::from_edges(200, edges);
}

// Smallest k with P[X <= k] >= q for X ~ Binomial(n, p).
std::size_t binomial_quantile(std::size_t n, double p, double q) {
  double cdf = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                           k * std::log(p) + (n - k) * std::log1p(-p);
    cdf += std::exp(log_pmf);
    if (cdf >= q) return k;
  }
  return n;
}

bool is_permutation_of_range(const std::vector<VertexId>& v) {
  std::vector<char> seen(v.size(), 0);
  for (VertexId x : v) {
    if (x >= v.size() || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

}  // namespace

TEST_CASE("s = 1 keeps every edge") {
  const Graph ground = generate_gnp(300, 0.05, 7);
  const ObservedPair pair = sample_observed_pair(ground, 1.0, 11);
  CHECK(pair.g1 == ground);
  CHECK(pair.g2.num_edges() == ground.num_edges());
  for (const Edge& e : ground.edges()) CHECK(pair.g2.has_edge(pair.truth[e.u], pair.truth[e.v]));
  CHECK(pair.s == 1.0);
}

TEST_CASE("s = 0 leaves both graphs edgeless") {
  const ObservedPair pair = sample_observed_pair(generate_gnp(300, 0.05, 7), 0.0, 3);
  CHECK(pair.g1.num_edges() == 0);
  CHECK(pair.g2.num_edges() == 0);
  CHECK(pair.num_vertices() == 300);
}

TEST_CASE("sampling probability must lie in [0, 1]") {
  const Graph ground = generate_gnp(10, 0.5, 1);
  CHECK_THROWS_AS(sample_observed_pair(ground, 1.5, 0), ParameterError);
  CHECK_THROWS_AS(sample_observed_pair(ground, -0.1, 0), ParameterError);
}

TEST_CASE("observed edges come from the groundtruth under the recorded labels") {
  const Graph ground = generate_chung_lu({.n = 3000, .beta = 2.5, .w_bar = 8.0, .i0 = std::nullopt, .rng_seed = 5});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ObservedPair pair = sample_observed_pair(ground, 0.6, seed);
    REQUIRE(is_permutation_of_range(pair.truth));
    pair.g1.check_invariants();
    pair.g2.check_invariants();
    const auto inv = pair.inverse_truth();
    for (VertexId a = 0; a < 3000; ++a) CHECK(inv[pair.truth[a]] == a);
    for (const Edge& e : pair.g1.edges()) CHECK(ground.has_edge(e.u, e.v));
    for (const Edge& e : pair.g2.edges()) CHECK(ground.has_edge(inv[e.u], inv[e.v]));
    // weights follow their vertex through the relabeling
    REQUIRE(pair.g2.has_weights());
    for (VertexId a = 0; a < 3000; a += 97) CHECK(pair.g2.weights()[pair.truth[a]] == ground.weights()[a]);
  }
}

TEST_CASE("retained edge count is binomial") {
  const Graph ground = circulant_10k();
  REQUIRE(ground.num_edges() == 10000);
  const std::size_t lo = binomial_quantile(10000, 0.5, 0.0005);
  const std::size_t hi = binomial_quantile(10000, 0.5, 0.9995);
  int inside = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const std::size_t m = sample_observed_pair(ground, 0.5, t).g1.num_edges();
    inside += m >= lo && m <= hi;
  }
  CHECK(inside >= 990);
}

TEST_CASE("the two views are sampled independently") {
  const Graph ground = circulant_10k();
  // |E1 and E2| ~ Binomial(|E|, s^2)
  const ObservedPair pair = sample_observed_pair(ground, 0.5, 99);
  const auto inv = pair.inverse_truth();
  std::size_t both = 0;
  for (const Edge& e : pair.g2.edges()) both += pair.g1.has_edge(inv[e.u], inv[e.v]);
  CHECK(std::abs(static_cast<double>(both) - 2500.0) < 5 * std::sqrt(10000 * 0.25 * 0.75));
}

TEST_CASE("sampling is deterministic in the seed") {
  const Graph ground = generate_gnp(500, 0.02, 1);
  const ObservedPair a = sample_observed_pair(ground, 0.7, 8);
  const ObservedPair b = sample_observed_pair(ground, 0.7, 8);
  CHECK(a.g1 == b.g1);
  CHECK(a.g2 == b.g2);
  CHECK(a.truth == b.truth);
}
