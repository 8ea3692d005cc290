#pragma once

#include <cmath>
#include <cstdint>

#include "ialm/error.hpp"
#include "ialm/linalg.hpp"
#include "ialm/qp_model.hpp"
#include "ialm/random.hpp"

namespace ialm {

struct KernelOptions {
  double h = 0.5;
  bool squared_distance = false;  // standard RBF; the default uses the plain distance
};

inline Matrix kernel_matrix(const Matrix& features, const KernelOptions& opt = {}) {
  require(features.rows() > 0 && features.cols() > 0, ErrorKind::InvalidArgument, "empty feature matrix");
  require(opt.h > 0.0, ErrorKind::InvalidArgument, "kernel width must be positive");
  const std::size_t n = features.rows();
  Matrix K(n, n);
  const double h2 = opt.h * opt.h;
  for (std::size_t i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < features.cols(); ++c) {
        const double t = features(i, c) - features(j, c);
        s += t * t;
      }
      const double dist = opt.squared_distance ? s : std::sqrt(s);
      K(i, j) = K(j, i) = std::exp(-dist / h2);
    }
  }
  return K;
}

// Kernel Hessian, one all-ones constraint with right-hand side 1, g standard normal.
inline QpProblem build_problem1(const Matrix& features, std::uint64_t seed, const KernelOptions& opt = {}) {
  Matrix H = kernel_matrix(features, opt);
  const std::size_t n = H.rows();
  Rng rng = make_rng(seed, SeedStream::Problem, 0);
  Vector g = standard_normal_vector(n, rng);
  return QpProblem(std::move(H), std::move(g), Matrix(1, n, 1.0), Vector{1.0}, BlockPartition::unit(n));
}

// H = 0.05 I with the 3×3 constraint matrix of the ADMM counterexample.
inline QpProblem build_problem2(std::uint64_t seed) {
  Rng rng = make_rng(seed, SeedStream::Problem, 0);
  Vector g = standard_normal_vector(3, rng);
  Vector b = standard_normal_vector(3, rng);
  Matrix H = 0.05 * Matrix::identity(3);
  Matrix A{{1, 1, 1}, {1, 1, 2}, {1, 2, 2}};
  return QpProblem(std::move(H), std::move(g), std::move(A), std::move(b), BlockPartition::unit(3));
}

// H = RᵀR/d + I, A, g, b standard normal.
inline QpProblem build_random_problem(std::size_t d, std::size_t m, std::uint64_t seed) {
  require(d >= m && m >= 1, ErrorKind::InvalidArgument, "random problem needs d >= m >= 1");
  Rng rng = make_rng(seed, SeedStream::Problem, 0);
  const Matrix R = standard_normal_matrix(d, d, rng);
  Matrix H = (1.0 / static_cast<double>(d)) * (R.transpose() * R) + Matrix::identity(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) H(j, i) = H(i, j);
  Matrix A = standard_normal_matrix(m, d, rng);
  Vector g = standard_normal_vector(d, rng);
  Vector b = standard_normal_vector(m, rng);
  return QpProblem(std::move(H), std::move(g), std::move(A), std::move(b), BlockPartition::unit(d));
}

// B = RᵀR + I with R uniform on [0, 1).
inline Matrix random_spd_uniform(std::size_t n, Rng& rng) {
  const Matrix R = uniform_matrix(n, n, rng);
  Matrix B = R.transpose() * R + Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) B(j, i) = B(i, j);
  return B;
}

}  // namespace ialm
