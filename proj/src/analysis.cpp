#include "deanon/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "deanon/errors.hpp"

namespace deanon {

double critical_seed_count(const TheoryParams& params) {
  if (params.r < 2) throw ParameterError("a_c needs r >= 2");
  if (params.n < 1) throw ParameterError("a_c needs n >= 1");
  if (!(params.p > 0.0 && params.p <= 1.0)) throw ParameterError("a_c needs 0 < p <= 1");
  if (!(params.s > 0.0 && params.s <= 1.0)) throw ParameterError("a_c needs 0 < s <= 1");
  const double r = params.r;
  const double log_q = std::log(params.p) + 2.0 * std::log(params.s);
  const double log_inner = std::lgamma(r) - std::log(static_cast<double>(params.n)) - r * log_q;
  return std::exp(std::log1p(-1.0 / r) + log_inner / (r - 1.0));
}

RegimeCheck check_critical_regime(const TheoryParams& params) {
  const double n = static_cast<double>(params.n);
  const double q = params.p * params.s * params.s;
  RegimeCheck c;
  c.above_connectivity = q > 1.0 / n;
  c.below_upper_bound = q <= params.s * params.s * std::pow(n, -4.0 / params.r);
  return c;
}

SeedExponent p1_seed_exponent(double gamma, double beta, std::uint32_t r) {
  if (!(gamma > 0.25 && gamma < 0.5)) throw ParameterError("gamma must lie in (1/4, 1/2)");
  if (!(beta > 2.0 && beta < 3.0)) throw ParameterError("beta must lie in (2, 3)");
  if (r < 2) throw ParameterError("r must be >= 2");
  const double rr = r;
  SeedExponent e;
  e.exponent = ((1.0 - 2.0 * gamma) * rr + gamma * (beta - 1.0) - 1.0) / (rr - 1.0);
  const double bound = 4.0 * (1.0 + gamma * (1.0 - beta)) / (1.0 - 2.0 * gamma);
  e.min_r = static_cast<std::uint32_t>(std::max(0.0, std::ceil(bound - 1e-9)));
  e.gamma_above_floor = gamma > 0.25 - 3.0 / (4.0 * rr);
  e.gamma_below_cap = gamma < 1.0 / (beta - 1.0);
  return e;
}

std::uint64_t boundary_edges(const Graph& g1, const Graph& g2, std::span<const VertexPair> seeds) {
  std::vector<VertexPair> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::uint64_t total = 0;
  for (const VertexPair& u : sorted) {
    total += static_cast<std::uint64_t>(g1.degree(u.a)) * g2.degree(u.b);
  }
  // Remove seed-to-seed pairs-graph edges, seen once from each side.
  constexpr VertexId kNone = ~VertexId{0};
  std::vector<VertexId> seed_partner(g1.num_vertices(), kNone);
  for (const VertexPair& u : sorted) seed_partner[u.a] = u.b;
  for (const VertexPair& u : sorted) {
    for (VertexId v1 : g1.neighbors(u.a)) {
      const VertexId v2 = seed_partner[v1];
      if (v2 != kNone && g2.has_edge(u.b, v2)) --total;
    }
  }
  return total;
}

std::optional<double> detect_transition(std::span<const CurvePoint> curve) {
  if (curve.size() < 4) throw ParameterError("transition detection needs at least 4 points");
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].a0 > curve[i - 1].a0)) throw ParameterError("curve must be sorted by a0");
  }
  double best = -1.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double jump = std::log(std::max(curve[i + 1].mean_matched, 1.0)) -
                        std::log(std::max(curve[i].mean_matched, 1.0));
    if (jump > best) {
      best = jump;
      at = i + 1;
    }
  }
  if (best < std::log(2.0)) return std::nullopt;
  return curve[at].a0;
}

std::size_t count_matchable(const ObservedPair& pair, std::size_t min_degree) {
  std::size_t count = 0;
  for (VertexId a = 0; a < pair.num_vertices(); ++a) {
    if (pair.g1.degree(a) >= min_degree && pair.g2.degree(pair.truth[a]) >= min_degree) ++count;
  }
  return count;
}

RunMetrics compute_metrics(const ObservedPair& pair, const MatchState& state,
                           std::size_t seeds_used) {
  const MatchCounts c = classify_matches(state, pair.truth);
  RunMetrics m;
  m.good = c.good;
  m.bad = c.bad;
  m.unmatched = c.unmatched;
  m.seeds_used = seeds_used;
  m.steps = state.processed_count();
  m.matchable = count_matchable(pair);
  return m;
}

}  // namespace deanon
