#include "deanon/power_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "deanon/errors.hpp"

namespace deanon {

namespace {

// 1 + m / sum ln(x_i / (d_min - shift)) over the samples x_i >= d_min.
PowerLawFit fit_tail(std::span<const double> samples, std::optional<double> d_min, double floor,
                     double shift) {
  double lower = 0.0;
  if (d_min) {
    if (!(*d_min >= floor) || *d_min - shift <= 0.0) {
      throw EstimationError("d_min must be >= " + std::to_string(floor));
    }
    lower = *d_min;
  } else {
    lower = std::numeric_limits<double>::infinity();
    for (double d : samples) {
      if (d >= floor && d > shift && d < lower) lower = d;
    }
    if (!std::isfinite(lower)) throw EstimationError("no sample reaches the lower cutoff");
  }

  const double base = lower - shift;
  double log_sum = 0.0;
  std::size_t m = 0;
  bool all_at_floor = true;
  for (double d : samples) {
    if (d < lower) continue;
    ++m;
    log_sum += std::log(d / base);
    if (d != lower) all_at_floor = false;
  }
  if (m < 10) {
    throw EstimationError("need at least 10 samples >= d_min, got " + std::to_string(m));
  }
  if (all_at_floor) {
    throw EstimationError("every tail sample equals d_min; the estimator diverges");
  }
  return {.exponent = 1.0 + static_cast<double>(m) / log_sum, .d_min = lower, .tail_size = m};
}

}  // namespace

PowerLawFit estimate_power_law_exponent(std::span<const double> samples,
                                        std::optional<double> d_min) {
  return fit_tail(samples, d_min, std::numeric_limits<double>::min(), 0.0);
}

PowerLawFit estimate_power_law_exponent(std::span<const std::size_t> degrees,
                                        std::optional<double> d_min) {
  std::vector<double> as_double(degrees.begin(), degrees.end());
  return fit_tail(as_double, d_min, 1.0, 0.5);
}

PowerLawFit fit_power_law_tail(std::span<const std::size_t> degrees, std::size_t min_tail) {
  min_tail = std::max<std::size_t>(min_tail, 10);
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t d : degrees) {
    if (d >= 1) ++hist[d];
  }
  std::vector<std::pair<double, double>> values(hist.begin(), hist.end());
  const std::size_t u = values.size();
  // Suffix sums over distinct degrees: tail counts and sum of count * ln d.
  std::vector<double> tail(u + 1, 0.0);
  std::vector<double> log_tail(u + 1, 0.0);
  for (std::size_t i = u; i-- > 0;) {
    tail[i] = tail[i + 1] + values[i].second;
    log_tail[i] = log_tail[i + 1] + values[i].second * std::log(values[i].first);
  }

  std::optional<PowerLawFit> best;
  double best_ks = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < u && tail[i] >= static_cast<double>(min_tail); ++i) {
    const double base = values[i].first - 0.5;
    const double m = tail[i];
    const double beta = 1.0 + m / (log_tail[i] - m * std::log(base));
    double ks = 0.0;
    for (std::size_t j = i; j < u; ++j) {
      const double empirical = tail[j] / m;
      const double model = std::pow((values[j].first - 0.5) / base, 1.0 - beta);
      ks = std::max(ks, std::abs(empirical - model));
    }
    if (ks < best_ks) {
      best_ks = ks;
      best = PowerLawFit{.exponent = beta, .d_min = values[i].first, .tail_size = static_cast<std::size_t>(m)};
    }
  }
  if (!best) throw EstimationError("too few distinct degrees for a tail fit");
  return *best;
}

}  // namespace deanon
