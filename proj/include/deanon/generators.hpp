#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deanon/graph.hpp"

namespace deanon {

// Parameters of a Chung-Lu groundtruth graph with power-law weights
//   w_i = w_bar * (beta-2)/(beta-1) * (n / (i + i0))^(1/(beta-1)),  i = 0..n-1.
// When i0 is unset, default_index_offset() is used, which caps the largest
// weight at sqrt(n).
struct WeightedGraphSpec {
  std::size_t n = 0;
  double beta = 2.5;
  double w_bar = 5.0;
  std::optional<double> i0;
  std::uint64_t rng_seed = 0;
};

// Smallest whole offset for which weight(0) <= sqrt(n).
double default_index_offset(std::size_t n, double beta, double w_bar);

// Non-increasing weight sequence of `spec`. Throws ParameterError when the
// spec is invalid (n < 2, beta <= 2, w_bar <= 0, i0 <= 0).
std::vector<double> weight_sequence(const WeightedGraphSpec& spec);

// Samples a Chung-Lu graph: each pair {i, j} is an edge independently with
// probability min(w_i w_j / sum(w), 1). Runs in expected O(n + |E|) by
// geometric skipping over the weight-sorted order. Weights are attached to
// the returned graph.
Graph generate_chung_lu(const WeightedGraphSpec& spec);
Graph generate_chung_lu(std::span<const double> weights, std::uint64_t rng_seed);

// Erdos-Renyi G(n, p).
Graph generate_gnp(std::size_t n, double p, std::uint64_t rng_seed);

// Edge probability giving expected mean degree `mean_degree` in G(n, p).
double gnp_probability_for_mean_degree(std::size_t n, double mean_degree);

// Finds the w_bar for which the realized mean of weight_sequence() equals
// `target_mean` (i0 left at its default). Needed because the default offset
// shifts the realized mean below the nominal w_bar.
double calibrate_w_bar(std::size_t n, double beta, double target_mean);

}  // namespace deanon
