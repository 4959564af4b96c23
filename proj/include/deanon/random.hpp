#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace deanon {

// 64-bit Mersenne twister. Its output sequence is fixed by the standard, and
// every draw below is derived from raw 64-bit words so that results do not
// depend on the standard library's distribution implementations.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent sub-stream seed for `stream` derived from `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe to pass to log().
inline double uniform_open0(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
  return uniform01(rng) < p;
}

// Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
inline std::size_t pick_index(Rng& rng, std::size_t bound) {
  const auto b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % b);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % b);
}

// Number of failures before the first success of a Bernoulli(p) sequence.
inline std::uint64_t geometric_skip(Rng& rng, double p) {
  if (p >= 1.0) return 0;
  const double skip = std::floor(std::log(uniform_open0(rng)) / std::log1p(-p));
  if (!(skip < 1.8e19)) return UINT64_MAX;
  return static_cast<std::uint64_t>(skip);
}

}  // namespace deanon
