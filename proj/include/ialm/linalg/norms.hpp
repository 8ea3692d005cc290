#pragma once

#include <cmath>
#include <limits>

#include "ialm/error.hpp"
#include "ialm/linalg/eigen.hpp"
#include "ialm/linalg/matrix.hpp"
#include "ialm/linalg/vector.hpp"
#include "ialm/tolerances.hpp"

namespace ialm {

// sqrt(vᵀBv)
inline double energy_norm(const Matrix& b, const Vector& v) {
  require(b.is_square() && b.cols() == v.size(), ErrorKind::DimensionMismatch,
          "energy_norm: dimension mismatch");
  const double q = v.dot(b * v);
  if (q < -Tolerances::negative_quadratic_form)
    throw Error(ErrorKind::NegativeQuadraticForm, "energy_norm: vᵀBv is negative");
  return std::sqrt(std::max(q, 0.0));
}

struct SingularValueRange {
  double max = 0.0;
  double min = 0.0;
};

// Extreme singular values from the eigenvalues of BᵀB.
inline SingularValueRange extreme_singular_values(const Matrix& b) {
  const Matrix btb = b.transpose() * b;
  const Vector ev = symmetric_eigen(btb).values;
  SingularValueRange out;
  if (ev.size() == 0) return out;
  out.max = std::sqrt(std::max(ev[0], 0.0));
  // The Gram matrix only carries the small singular values for square or tall B.
  out.min = b.rows() >= b.cols() ? std::sqrt(std::max(ev[ev.size() - 1], 0.0)) : 0.0;
  return out;
}

inline double spectral_norm(const Matrix& b) { return extreme_singular_values(b).max; }

// Symmetric input uses |λ| directly; otherwise the Gram eigenvalues, where
// anything under the n·ε·λ_max rounding floor counts as zero.
inline double condition_number_2(const Matrix& b) {
  require(b.is_square(), ErrorKind::DimensionMismatch, "condition_number_2: matrix must be square");
  double hi = 0.0;
  double lo = 0.0;
  if (b.is_symmetric(Tolerances::symmetry_rel)) {
    const Vector ev = symmetric_eigen(b).values;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      hi = std::max(hi, std::abs(ev[i]));
      lo = i == 0 ? std::abs(ev[i]) : std::min(lo, std::abs(ev[i]));
    }
  } else {
    const Vector ev = symmetric_eigen(b.transpose() * b).values;
    const double floor = static_cast<double>(b.rows()) * std::numeric_limits<double>::epsilon() * ev[0];
    if (ev[ev.size() - 1] <= floor) throw Error(ErrorKind::Singular, "condition_number_2: matrix is numerically singular");
    hi = std::sqrt(ev[0]);
    lo = std::sqrt(ev[ev.size() - 1]);
  }
  if (!(lo >= Tolerances::singular_ratio * hi) || hi == 0.0)
    throw Error(ErrorKind::Singular, "condition_number_2: matrix is numerically singular");
  return hi / lo;
}

namespace detail {

inline Matrix spd_power(const Matrix& b, double exponent) {
  const SymmetricEigen eig = symmetric_eigen(b);
  const std::size_t n = b.rows();
  Vector f(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lambda = eig.values[k];
    if (lambda < -Tolerances::sqrt_clamp)
      throw Error(ErrorKind::NotSPD, "matrix power: negative eigenvalue");
    lambda = std::max(lambda, 0.0);
    if (exponent < 0.0 && lambda == 0.0)
      throw Error(ErrorKind::NotSPD, "matrix power: singular matrix has no inverse root");
    f[k] = std::pow(lambda, exponent);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += eig.vectors(i, k) * f[k] * eig.vectors(j, k);
      out(i, j) = s;
    }
  return out;
}

}  // namespace detail

inline Matrix spd_sqrt(const Matrix& b) { return detail::spd_power(b, 0.5); }
inline Matrix spd_inverse_sqrt(const Matrix& b) { return detail::spd_power(b, -0.5); }

}  // namespace ialm
