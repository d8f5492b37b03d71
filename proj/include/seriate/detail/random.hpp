#ifndef SERIATE_DETAIL_RANDOM_HPP
#define SERIATE_DETAIL_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace seriate::detail {

// All randomized operations in the library draw from std::mt19937_64, whose
// output sequence is fixed by the standard, through the helpers below.
// std::uniform_int_distribution and std::normal_distribution are
// implementation-defined, so they are not used anywhere results must be
// reproducible across platforms.

using rng64 = std::mt19937_64;

// Unbiased draw from {0, ..., n-1} by rejection.
inline std::uint64_t uniform_index(rng64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1).
inline double uniform01(rng64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

// Standard normal via Box-Muller.
inline double gauss(rng64& rng) {
  double u1 = uniform01(rng);
  while (u1 == 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, rng64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// Random permutation of {1, ..., n}.
inline std::vector<int> random_permutation(int n, rng64& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i + 1;
  shuffle(p, rng);
  return p;
}

}  // namespace seriate::detail

#endif  // SERIATE_DETAIL_RANDOM_HPP
