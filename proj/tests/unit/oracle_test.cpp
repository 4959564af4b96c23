#include <doctest.h>

#include <vector>

#include "deanon/analysis.hpp"
#include "deanon/errors.hpp"
#include "deanon/oracle.hpp"
#include "test_support.hpp"

using namespace deanon;

TEST_CASE("single edge on both sides") {
  const Graph g = testing::make_graph(2, {{0, 1}});
  const auto pg = oracle::build_pairs_graph(g, g);
  CHECK(pg.num_edges() == 2);
  auto adjacent = [&](VertexPair x, VertexPair y) {
    const auto& adj = pg.adjacency[pg.index(x)];
    return std::find(adj.begin(), adj.end(), pg.index(y)) != adj.end();
  };
  CHECK(adjacent({0, 0}, {1, 1}));
  CHECK(adjacent({0, 1}, {1, 0}));
  CHECK_FALSE(adjacent({0, 0}, {0, 1}));
  CHECK_FALSE(adjacent({0, 0}, {1, 0}));
}

TEST_CASE("edgeless inputs give an edgeless pairs graph") {
  const Graph g = Graph::from_edges(7, std::vector<Edge>{});
  CHECK(oracle::build_pairs_graph(g, g).num_edges() == 0);
}

TEST_CASE("pairs-graph edge count is 2 |E1| |E2|") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ObservedPair pair = testing::random_pair(10, 0.3, 0.8, seed);
    const auto pg = oracle::build_pairs_graph(pair);
    CHECK(pg.num_edges() == 2 * pair.g1.num_edges() * pair.g2.num_edges());
    std::size_t degree_sum = 0;
    for (const auto& adj : pg.adjacency) degree_sum += adj.size();
    CHECK(degree_sum == 2 * pg.num_edges());
  }
}

TEST_CASE("size guard") {
  const Graph big = generate_gnp(oracle::kMaxVertices + 1, 0.0, 1);
  const Graph small = generate_gnp(10, 0.0, 1);
  CHECK_THROWS_AS(oracle::build_pairs_graph(big, small), ParameterError);
  CHECK_NOTHROW(oracle::build_pairs_graph(generate_gnp(oracle::kMaxVertices, 0.0, 1), small));
}

TEST_CASE("reference matcher trivial cases") {
  const ObservedPair pair = testing::random_pair(20, 0.3, 0.9, 3);
  const auto pg = oracle::build_pairs_graph(pair);
  std::vector<VertexPair> all;
  for (VertexId a = 0; a < 20; ++a) all.push_back({a, pair.truth[a]});
  std::sort(all.begin(), all.end());
  CHECK(oracle::run_pgm_reference(pg, all, 4, 1) == all);
  CHECK(oracle::run_pgm_reference(pg, {}, 2, 1).empty());
  const std::vector<VertexPair> few(all.begin(), all.begin() + 5);
  // five seeds can supply at most five marks
  CHECK(oracle::run_pgm_reference(pg, few, 6, 1) == few);
}

TEST_CASE("engine and reference agree on randomized instances") {
  Rng rng(2024);
  const double s_values[] = {0.5, 0.7, 0.9, 1.0};
  int instances = 0;
  int nontrivial = 0;
  for (int i = 0; i < 240; ++i) {
    const std::size_t n = 5 + pick_index(rng, 26);
    const double p = 0.15 + 0.5 * uniform01(rng);
    const double s = s_values[pick_index(rng, 4)];
    const auto r = static_cast<std::uint32_t>(2 + pick_index(rng, 3));
    const std::size_t a0 = pick_index(rng, n + 1);
    const std::uint64_t seed = rng();
    const ObservedPair pair = testing::random_pair(n, p, s, seed);
    const auto seeds = select_seeds(pair, {.mode = SeedMode::uniform, .count = a0, .degree_lo = 0, .degree_hi = 0, .pairs = {}, .rng_seed = seed ^ 1});
    const auto order = i % 5 == 4 ? FrontierOrder::fifo : FrontierOrder::uniform_random;
    const MatchState engine = run_pgm(pair, seeds, {.threshold = r, .order = order, .rng_seed = seed ^ 2});
    const auto reference = oracle::run_pgm_reference(oracle::build_pairs_graph(pair), seeds, r, seed ^ 2, order);
    CHECK(testing::matched_pairs(engine) == reference);
    ++instances;
    nontrivial += reference.size() > seeds.size();
  }
  CHECK(instances >= 200);
  CHECK(nontrivial >= 40);
}

TEST_CASE("boundary edges agree with exhaustive enumeration") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 6 + seed % 10;
    const ObservedPair pair = testing::random_pair(n, 0.4, 0.8, seed);
    const auto pg = oracle::build_pairs_graph(pair);
    for (std::size_t a0 : {std::size_t{0}, std::size_t{1}, n / 2, n}) {
      const auto seeds = select_seeds(pair, {.mode = SeedMode::uniform, .count = a0, .degree_lo = 0, .degree_hi = 0, .pairs = {}, .rng_seed = seed});
      CHECK(boundary_edges(pair, seeds) == oracle::boundary_edges_reference(pg, seeds));
    }
    // arbitrary (not necessarily good) pairs as seeds
    const std::vector<VertexPair> odd{{0, 1}, {1, 0}, {2, 3}};
    CHECK(boundary_edges(pair, odd) == oracle::boundary_edges_reference(pg, odd));
  }
}
