#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deanon/pgm.hpp"
#include "deanon/sampling.hpp"

namespace deanon {

struct TheoryParams {
  std::size_t n = 0;
  double p = 0.0;
  double s = 1.0;
  std::uint32_t r = 4;
  double gamma = 0.45;
  double beta = 2.5;
};

// Critical seed count of PGM on G(n, p):
//   a_c = (1 - 1/r) * ((r-1)! / (n (p s^2)^r))^(1/(r-1)),
// evaluated in log space. Requires r >= 2, n >= 1 and p*s^2 > 0.
double critical_seed_count(const TheoryParams& params);

// Whether 1/n < p s^2 <= s^2 n^(-4/r), the regime where the a_c formula is
// proven sharp.
struct RegimeCheck {
  bool above_connectivity = false;  // p s^2 > 1/n
  bool below_upper_bound = false;   // p s^2 <= s^2 n^(-4/r)
  bool inside() const noexcept { return above_connectivity && below_upper_bound; }
};
RegimeCheck check_critical_regime(const TheoryParams& params);

// Seed bound for the top slice: |A0| >> n^exponent suffices with threshold r,
// provided r >= min_r and the two validity conditions hold.
struct SeedExponent {
  double exponent = 0.0;
  std::uint32_t min_r = 0;
  bool gamma_above_floor = false;  // gamma > 1/4 - 3/(4r)
  bool gamma_below_cap = false;    // gamma < 1/(beta-1)
};
// Requires 1/4 < gamma < 1/2 and 2 < beta < 3.
SeedExponent p1_seed_exponent(double gamma, double beta, std::uint32_t r);

// Pairs-graph edges between seed pairs and non-seed pairs.
std::uint64_t boundary_edges(const Graph& g1, const Graph& g2, std::span<const VertexPair> seeds);
inline std::uint64_t boundary_edges(const ObservedPair& pair, std::span<const VertexPair> seeds) {
  return boundary_edges(pair.g1, pair.g2, seeds);
}

struct CurvePoint {
  double a0 = 0.0;
  double mean_matched = 0.0;
};

// Seed count at the largest jump of log(mean_matched) between consecutive
// grid points, i.e. the right end of the steepest step; ties go to the
// smaller seed count. Counts below 1 are read as 1. Returns nullopt when the
// largest jump is below a factor 2. Throws ParameterError for fewer than 4
// points or an unsorted curve.
std::optional<double> detect_transition(std::span<const CurvePoint> curve);

struct RunMetrics {
  std::size_t good = 0;
  std::size_t bad = 0;
  std::size_t unmatched = 0;
  std::size_t seeds_used = 0;
  std::uint64_t steps = 0;
  std::size_t matchable = 0;  // vertices with observed degree >= 4 in both graphs

  double precision() const noexcept {
    return good + bad == 0 ? 1.0 : static_cast<double>(good) / static_cast<double>(good + bad);
  }
  double recall() const noexcept {
    return matchable == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(matchable);
  }
  double bad_fraction() const noexcept { return 1.0 - precision(); }
};

// Ground-truth vertices whose observed degree is at least `min_degree` in
// both graphs.
std::size_t count_matchable(const ObservedPair& pair, std::size_t min_degree = 4);

RunMetrics compute_metrics(const ObservedPair& pair, const MatchState& state,
                           std::size_t seeds_used);

}  // namespace deanon
