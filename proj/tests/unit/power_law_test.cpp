#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "deanon/errors.hpp"
#include "deanon/power_law.hpp"
#include "deanon/random.hpp"

using namespace deanon;

namespace {

std::vector<double> pareto_samples(std::size_t m, double beta, double x_min, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(m);
  for (auto& v : x) v = x_min * std::pow(uniform_open0(rng), -1.0 / (beta - 1.0));
  return x;
}

}  // namespace

TEST_CASE("hand-computed estimate") {
  const std::vector<std::size_t> d{1, 1, 2, 2, 3, 4, 5, 8, 13, 21, 34, 55};
  double log_sum = 0.0;
  for (std::size_t x : d) {
    if (x >= 2) log_sum += std::log(static_cast<double>(x) / 1.5);
  }
  const auto fit = estimate_power_law_exponent(d, 2.0);
  CHECK(fit.tail_size == 10);
  CHECK(fit.d_min == 2.0);
  CHECK(fit.exponent == doctest::Approx(1.0 + 10.0 / log_sum).epsilon(1e-12));
}

TEST_CASE("d_min defaults to the smallest sample >= 1") {
  const std::vector<std::size_t> d{0, 0, 3, 3, 4, 4, 5, 6, 7, 9, 12, 30};
  const auto fit = estimate_power_law_exponent(d);
  CHECK(fit.d_min == 3.0);
  CHECK(fit.tail_size == 10);
}

TEST_CASE("continuous samples use the unshifted estimator") {
  const std::vector<double> x{0.5, 2.0, 2.5, 3.0, 4.0, 4.5, 6.0, 8.0, 11.0, 20.0, 35.0};
  double log_sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) log_sum += std::log(x[i] / 2.0);
  const auto fit = estimate_power_law_exponent(x, 2.0);
  CHECK(fit.tail_size == 10);
  CHECK(fit.exponent == doctest::Approx(1.0 + 10.0 / log_sum).epsilon(1e-12));
  // default cutoff is the smallest positive sample
  const auto all = estimate_power_law_exponent(x);
  CHECK(all.d_min == 0.5);
  CHECK(all.tail_size == 11);
  CHECK_THROWS_AS(estimate_power_law_exponent(x, 0.0), EstimationError);
}

TEST_CASE("degenerate samples are rejected") {
  const std::vector<std::size_t> flat(50, 7);
  CHECK_THROWS_AS(estimate_power_law_exponent(flat), EstimationError);
  const std::vector<std::size_t> few{2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK_THROWS_AS(estimate_power_law_exponent(few), EstimationError);
  const std::vector<std::size_t> zeros(30, 0);
  CHECK_THROWS_AS(estimate_power_law_exponent(zeros), EstimationError);
}

TEST_CASE("Pareto samples recover their exponent") {
  for (double beta : {2.2, 2.5, 2.9}) {
    auto x = pareto_samples(100000, beta, 100.0, static_cast<std::uint64_t>(beta * 1000));
    std::vector<double> sorted = x;
    std::nth_element(sorted.begin(), sorted.begin() + 1000, sorted.end());
    const double d_min = sorted[1000];
    const auto fit = estimate_power_law_exponent(x, d_min);
    CHECK(std::abs(fit.exponent - beta) < 0.05);
    CHECK(fit.tail_size >= 98000);
  }
}

TEST_CASE("tail fit skips a non-power-law head") {
  Rng rng(31);
  std::vector<std::size_t> d;
  for (int i = 0; i < 40000; ++i) d.push_back(1 + pick_index(rng, 6));
  for (int i = 0; i < 60000; ++i) {
    d.push_back(static_cast<std::size_t>(std::floor(30.0 * std::pow(uniform_open0(rng), -1.0 / 1.5) + 0.5)));
  }
  const auto naive = estimate_power_law_exponent(d);
  CHECK(std::abs(naive.exponent - 2.5) > 0.5);
  const auto fit = fit_power_law_tail(d);
  CHECK(fit.d_min >= 7.0);
  CHECK(fit.exponent == doctest::Approx(2.5).epsilon(0.04));
  CHECK(fit.tail_size >= 100);
  CHECK_THROWS_AS(fit_power_law_tail(d, 1000000), EstimationError);
}
