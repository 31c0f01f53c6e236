#pragma once

#include <cstdint>
#include <cstring>
#include <random>

#include "aftmc/types.hpp"

namespace aftmc {

/// splitmix64 step; the workhorse behind all seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (salt + 1));
  return splitmix64(s);
}

inline std::uint64_t double_bits(double v) {
  std::uint64_t b = 0;
  std::memcpy(&b, &v, sizeof(b));
  return b;
}

/// Fill with circularly-symmetric complex Gaussian samples, variance
/// `sigma2` per complex element. Column-major fill order, so the stream is
/// reproducible for a given seed regardless of how the caller slices it.
template <typename Derived>
void fill_complex_gaussian(Eigen::MatrixBase<Derived>& out, double sigma2,
                           std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, std::sqrt(sigma2 / 2.0));
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      out(r, c) = Complex(n(gen), n(gen));
}

}  // namespace aftmc
