#pragma once

#include <cstdint>
#include <random>

#include "ialm/linalg/matrix.hpp"
#include "ialm/linalg/vector.hpp"

namespace ialm {

using Rng = std::mt19937_64;

// Independent randomness sources carved out of one user seed.
enum class SeedStream : std::uint64_t {
  Problem = 1,
  Trajectory = 2,
  Permutation = 3,
  Matrix = 4,
  Trial = 5,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream, std::uint64_t index = 0) {
  return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream))) + index);
}

inline Rng make_rng(std::uint64_t seed, SeedStream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

inline Vector standard_normal_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

inline Matrix standard_normal_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

// Entries uniform on [0, 1), the distribution of Matlab's rand.
inline Matrix uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

}  // namespace ialm
