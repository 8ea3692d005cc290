#pragma once

#include <cmath>

#include "ialm/error.hpp"
#include "ialm/linalg/matrix.hpp"
#include "ialm/linalg/vector.hpp"
#include "ialm/tolerances.hpp"

namespace ialm {

// Cholesky factor B = G Gᵀ of a symmetric positive definite matrix.
class Cholesky {
 public:
  Cholesky() = default;

  explicit Cholesky(const Matrix& b) {
    require(b.is_square(), ErrorKind::DimensionMismatch, "cholesky: matrix must be square");
    require(b.is_symmetric(Tolerances::symmetry_rel), ErrorKind::NotSPD,
            "cholesky: matrix is not symmetric");
    const std::size_t n = b.rows();
    g_ = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      double pivot = b(j, j);
      for (std::size_t k = 0; k < j; ++k) pivot -= g_(j, k) * g_(j, k);
      if (!(pivot > 0.0)) throw Error(ErrorKind::NotSPD, "cholesky: non-positive pivot");
      const double gjj = std::sqrt(pivot);
      g_(j, j) = gjj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = b(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= g_(i, k) * g_(j, k);
        g_(i, j) = s / gjj;
      }
    }
  }

  std::size_t order() const noexcept { return g_.rows(); }
  const Matrix& factor() const noexcept { return g_; }

  Vector solve(const Vector& rhs) const {
    require(rhs.size() == order(), ErrorKind::DimensionMismatch, "cholesky solve: rhs length");
    const std::size_t n = order();
    Vector y(rhs);
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[i];
      for (std::size_t k = 0; k < i; ++k) s -= g_(i, k) * y[k];
      y[i] = s / g_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= g_(k, ii) * y[k];
      y[ii] = s / g_(ii, ii);
    }
    return y;
  }

  // Solves B X = R column by column.
  Matrix solve(const Matrix& rhs) const {
    require(rhs.rows() == order(), ErrorKind::DimensionMismatch, "cholesky solve: rhs rows");
    Matrix x(rhs.rows(), rhs.cols());
    for (std::size_t j = 0; j < rhs.cols(); ++j) x.set_column(j, solve(rhs.column(j)));
    return x;
  }

  Matrix inverse() const { return solve(Matrix::identity(order())); }

 private:
  Matrix g_;
};

inline Vector cholesky_solve(const Matrix& b, const Vector& rhs) {
  require(b.rows() == rhs.size(), ErrorKind::DimensionMismatch, "cholesky_solve: rhs length");
  return Cholesky(b).solve(rhs);
}

}  // namespace ialm
