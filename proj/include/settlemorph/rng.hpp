#pragma once

// Seeded randomness with a platform-independent sequence. std::mt19937_64's output is
// fully specified by the standard, but the std distributions are not, so the few
// draws this project needs are derived here directly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace settlemorph::rng {

using Engine = std::mt19937_64;

inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Modulo bias is below 2^-40 for every n used here.
inline std::size_t uniform_index(Engine& engine, std::size_t n) {
  return static_cast<std::size_t>(engine() % static_cast<std::uint64_t>(n));
}

/// Standard normal via Box-Muller.
inline double normal(Engine& engine) {
  double u1 = uniform01(engine);
  while (u1 <= 0.0) u1 = uniform01(engine);
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Engine engine(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(engine, i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace settlemorph::rng
