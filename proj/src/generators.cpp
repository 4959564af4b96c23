#include "deanon/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "deanon/errors.hpp"
#include "deanon/random.hpp"

namespace deanon {

namespace {

void validate(const WeightedGraphSpec& spec) {
  if (spec.n < 2) throw ParameterError("Chung-Lu spec needs n >= 2");
  if (!(spec.beta > 2.0)) throw ParameterError("Chung-Lu spec needs beta > 2");
  if (!(spec.w_bar > 0.0)) throw ParameterError("Chung-Lu spec needs w_bar > 0");
  if (spec.i0 && !(*spec.i0 > 0.0)) {
    throw ParameterError("index offset i0 must be positive (weight(0) is unbounded at i0 = 0)");
  }
}

}  // namespace

double default_index_offset(std::size_t n, double beta, double w_bar) {
  const double nd = static_cast<double>(n);
  const double scale = w_bar * (beta - 2.0) / (beta - 1.0);
  const double exact = nd * std::pow(scale / std::sqrt(nd), beta - 1.0);
  return std::max(1.0, std::ceil(exact));
}

std::vector<double> weight_sequence(const WeightedGraphSpec& spec) {
  validate(spec);
  const double i0 = spec.i0.value_or(default_index_offset(spec.n, spec.beta, spec.w_bar));
  const double nd = static_cast<double>(spec.n);
  const double scale = spec.w_bar * (spec.beta - 2.0) / (spec.beta - 1.0);
  const double exponent = 1.0 / (spec.beta - 1.0);
  std::vector<double> w(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    w[i] = scale * std::pow(nd / (static_cast<double>(i) + i0), exponent);
  }
  return w;
}

Graph generate_chung_lu(const WeightedGraphSpec& spec) {
  return generate_chung_lu(weight_sequence(spec), spec.rng_seed);
}

Graph generate_chung_lu(std::span<const double> weights, std::uint64_t rng_seed) {
  const std::size_t n = weights.size();
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weights must be finite and >= 0");
  }
  // Visit vertices in non-increasing weight order so that, for a fixed u,
  // the edge probability is non-increasing along v.
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return weights[a] > weights[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = weights[order[i]];
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(total / 2.0 * 1.05) + 16);
  Rng rng(rng_seed);
  if (total > 0.0) {
    for (std::size_t u = 0; u + 1 < n; ++u) {
      std::size_t v = u + 1;
      double p = std::min(sorted[u] * sorted[v] / total, 1.0);
      while (v < n && p > 0.0) {
        if (p < 1.0) {
          const std::uint64_t skip = geometric_skip(rng, p);
          if (skip >= n - v) break;
          v += static_cast<std::size_t>(skip);
        }
        const double q = std::min(sorted[u] * sorted[v] / total, 1.0);
        if (uniform01(rng) < q / p) edges.push_back({order[u], order[v]});
        p = q;
        ++v;
      }
    }
  }
  return Graph::from_edges(n, edges).with_weights({weights.begin(), weights.end()});
}

Graph generate_gnp(std::size_t n, double p, std::uint64_t rng_seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("G(n,p) needs 0 <= p <= 1");
  std::vector<Edge> edges;
  if (n >= 2 && p > 0.0) {
    edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * (n - 1) / 2.0 * 1.05) + 16);
    Rng rng(rng_seed);
    // Walk the lower triangle (v, w), w < v, in row-major order with
    // geometric gaps between successive edges.
    std::uint64_t v = 1;
    std::uint64_t w = 0;
    bool first = true;
    while (v < n) {
      const std::uint64_t skip = geometric_skip(rng, p);
      if (skip == UINT64_MAX) break;
      w += skip + (first ? 0 : 1);
      first = false;
      while (w >= v && v < n) {
        w -= v;
        ++v;
      }
      if (v < n) edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(w)});
    }
  }
  return Graph::from_edges(n, edges);
}

double gnp_probability_for_mean_degree(std::size_t n, double mean_degree) {
  if (n < 2) throw ParameterError("G(n,p) needs n >= 2");
  if (!(mean_degree >= 0.0)) throw ParameterError("mean degree must be >= 0");
  const double p = mean_degree / static_cast<double>(n - 1);
  if (p > 1.0) throw ParameterError("mean degree exceeds n-1");
  return p;
}

double calibrate_w_bar(std::size_t n, double beta, double target_mean) {
  if (!(target_mean > 0.0)) throw ParameterError("target mean weight must be positive");
  auto realized = [&](double w_bar) {
    const auto w = weight_sequence({.n = n, .beta = beta, .w_bar = w_bar, .i0 = std::nullopt, .rng_seed = 0});
    return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
  };
  double lo = target_mean;
  double hi = target_mean;
  for (int i = 0; realized(hi) < target_mean; ++i) {
    if (i == 60) {
      throw ParameterError("mean weight " + std::to_string(target_mean) +
                           " unreachable with max weight sqrt(n)");
    }
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 80 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (realized(mid) < target_mean ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace deanon
