#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace deanon {

struct PowerLawFit {
  double exponent = 0.0;
  double d_min = 0.0;
  std::size_t tail_size = 0;  // samples >= d_min used by the fit
};

// Maximum-likelihood power-law exponent of the tail above d_min.
//
// Continuous samples use the exact estimator
//   beta_hat = 1 + m / sum_{x_i >= d_min} ln(x_i / d_min),
// with d_min defaulting to the smallest positive sample.
//
// Integer degrees use the continuous approximation with a half-unit
// discreteness shift,
//   beta_hat = 1 + m / sum_{d_i >= d_min} ln(d_i / (d_min - 1/2)),
// with d_min >= 1, defaulting to the smallest degree >= 1.
//
// Throws EstimationError when fewer than 10 samples reach d_min or when every
// tail sample equals d_min.
PowerLawFit estimate_power_law_exponent(std::span<const double> samples,
                                        std::optional<double> d_min = std::nullopt);
PowerLawFit estimate_power_law_exponent(std::span<const std::size_t> degrees,
                                        std::optional<double> d_min = std::nullopt);

// Discrete fit with d_min chosen to minimize the Kolmogorov-Smirnov distance
// between the empirical tail and the fitted law, over every distinct degree
// that leaves at least `min_tail` samples (never fewer than 10).
PowerLawFit fit_power_law_tail(std::span<const std::size_t> degrees, std::size_t min_tail = 100);

}  // namespace deanon
