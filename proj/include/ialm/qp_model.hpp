#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/linalg.hpp"
#include "ialm/tolerances.hpp"

namespace ialm {

// Partition of the primal variables into consecutive blocks.
class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    require(!sizes_.empty(), ErrorKind::InvalidArgument, "block partition needs at least one block");
    offsets_.reserve(sizes_.size());
    std::size_t offset = 0;
    for (std::size_t s : sizes_) {
      require(s > 0, ErrorKind::InvalidArgument, "block sizes must be positive");
      offsets_.push_back(offset);
      offset += s;
    }
    total_ = offset;
  }

  static BlockPartition unit(std::size_t d) { return BlockPartition(std::vector<std::size_t>(d, 1)); }
  static BlockPartition single(std::size_t d) { return BlockPartition({d}); }

  std::size_t count() const noexcept { return sizes_.size(); }
  std::size_t total() const noexcept { return total_; }
  std::size_t size(std::size_t block) const { return sizes_[block]; }
  std::size_t offset(std::size_t block) const { return offsets_[block]; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  // Partition of PxPᵀ when blocks are visited in the order given by a block permutation.
  BlockPartition permuted(const Permutation& block_order) const {
    require(block_order.order() == count(), ErrorKind::DimensionMismatch, "block permutation order");
    std::vector<std::size_t> s(count());
    for (std::size_t i = 0; i < count(); ++i) s[i] = sizes_[block_order[i]];
    return BlockPartition(std::move(s));
  }

  // Scalar permutation that moves whole blocks according to a block permutation.
  Permutation expand(const Permutation& block_order) const {
    require(block_order.order() == count(), ErrorKind::DimensionMismatch, "block permutation order");
    std::vector<std::size_t> img;
    img.reserve(total_);
    for (std::size_t i = 0; i < count(); ++i) {
      const std::size_t blk = block_order[i];
      for (std::size_t k = 0; k < sizes_[blk]; ++k) img.push_back(offsets_[blk] + k);
    }
    return Permutation(std::move(img));
  }

  friend bool operator==(const BlockPartition& a, const BlockPartition& b) { return a.sizes_ == b.sizes_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

// min ½xᵀHx + gᵀx  s.t.  Ax = b, with H SPD and A of full row rank.
class QpProblem {
 public:
  QpProblem(Matrix h, Vector g, Matrix a, Vector b, BlockPartition blocks)
      : h_(std::move(h)), g_(std::move(g)), a_(std::move(a)), b_(std::move(b)), blocks_(std::move(blocks)) {
    const std::size_t d = h_.rows();
    require(h_.is_square() && d > 0, ErrorKind::DimensionMismatch, "H must be square and non-empty");
    require(g_.size() == d, ErrorKind::DimensionMismatch, "g length must equal d");
    require(a_.cols() == d, ErrorKind::DimensionMismatch, "A must have d columns");
    require(a_.rows() >= 1 && a_.rows() <= d, ErrorKind::DimensionMismatch, "A must satisfy 1 <= m <= d");
    require(b_.size() == a_.rows(), ErrorKind::DimensionMismatch, "b length must equal m");
    require(blocks_.total() == d, ErrorKind::DimensionMismatch, "block sizes must sum to d");
    require(h_.all_finite() && g_.all_finite() && a_.all_finite() && b_.all_finite(), ErrorKind::NonFinite,
            "problem data must be finite");
    require(h_.is_symmetric(Tolerances::symmetry_rel), ErrorKind::NotSPD, "H must be symmetric");
    const Vector ev = symmetric_eigen(h_).values;
    require(ev[ev.size() - 1] > 0.0, ErrorKind::NotSPD, "H must be positive definite");
    const Matrix aat = a_ * a_.transpose();
    double cond = 0.0;
    try {
      cond = condition_number_2(aat);
    } catch (const Error&) {
      throw Error(ErrorKind::RankDeficient, "A does not have full row rank");
    }
    require(cond < Tolerances::rank_condition_max, ErrorKind::RankDeficient, "A does not have full row rank");
  }

  std::size_t dim() const noexcept { return h_.rows(); }
  std::size_t constraints() const noexcept { return a_.rows(); }
  const Matrix& H() const noexcept { return h_; }
  const Vector& g() const noexcept { return g_; }
  const Matrix& A() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  const BlockPartition& blocks() const noexcept { return blocks_; }

  QpProblem with_blocks(BlockPartition blocks) const {
    QpProblem copy = *this;
    require(blocks.total() == dim(), ErrorKind::DimensionMismatch, "block sizes must sum to d");
    copy.blocks_ = std::move(blocks);
    return copy;
  }

 private:
  Matrix h_;
  Vector g_;
  Matrix a_;
  Vector b_;
  BlockPartition blocks_;
};

struct PrimalDualPoint {
  Vector x;
  Vector mu;

  static PrimalDualPoint zero(const QpProblem& p) { return {Vector(p.dim()), Vector(p.constraints())}; }
  Vector stacked() const { return Vector::concat(x, mu); }
  static PrimalDualPoint split(const Vector& z, std::size_t d) {
    return {z.segment(0, d), z.segment(d, z.size() - d)};
  }
};

struct ResidualReport {
  double primal = 0.0;          // ‖Ax − b‖
  double dual = 0.0;            // ‖Hx + g − Aᵀμ‖
  double combined = 0.0;        // ‖𝓐[x; μ] − q‖
  double inner_residual = 0.0;  // ‖H_β x − χ‖ of the inner solve that produced x
};

// Block-diagonal / strictly-block-lower split of a symmetric matrix: M = D − L − Lᵀ.
struct BlockSplit {
  Matrix D;
  Matrix L;
};

inline BlockSplit block_split(const Matrix& m, const BlockPartition& blocks) {
  require(m.is_square() && m.rows() == blocks.total(), ErrorKind::DimensionMismatch, "block_split");
  const std::size_t n = m.rows();
  std::vector<std::size_t> owner(n);
  for (std::size_t b = 0; b < blocks.count(); ++b)
    for (std::size_t k = 0; k < blocks.size(b); ++k) owner[blocks.offset(b) + k] = b;
  BlockSplit s{Matrix(n, n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (owner[i] == owner[j])
        s.D(i, j) = m(i, j);
      else if (owner[i] > owner[j])
        s.L(i, j) = -m(i, j);
    }
  return s;
}

inline std::vector<Cholesky> factor_diagonal_blocks(const Matrix& m, const BlockPartition& blocks) {
  std::vector<Cholesky> factors;
  factors.reserve(blocks.count());
  for (std::size_t b = 0; b < blocks.count(); ++b) {
    try {
      factors.emplace_back(m.block(blocks.offset(b), blocks.offset(b), blocks.size(b), blocks.size(b)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotSPD) throw;
      throw Error(ErrorKind::SingularBlock, "diagonal block " + std::to_string(b) + " is not SPD");
    }
  }
  return factors;
}

// Solves (D − L) y = rhs by block forward substitution, where D − L is the
// block lower triangle of m (diagonal blocks included).
inline Vector block_lower_solve(const Matrix& m, const BlockPartition& blocks,
                                const std::vector<Cholesky>& factors, const Vector& rhs) {
  require(rhs.size() == m.rows(), ErrorKind::DimensionMismatch, "block_lower_solve");
  Vector y(rhs.size());
  for (std::size_t b = 0; b < blocks.count(); ++b) {
    const std::size_t off = blocks.offset(b);
    const std::size_t sz = blocks.size(b);
    Vector r(sz);
    for (std::size_t i = 0; i < sz; ++i) {
      double s = rhs[off + i];
      const auto row = m.row(off + i);
      for (std::size_t j = 0; j < off; ++j) s -= row[j] * y[j];
      r[i] = s;
    }
    y.set_segment(off, factors[b].solve(r));
  }
  return y;
}

// β-dependent objects derived from a QpProblem.
struct AugmentedSystem {
  double beta = 0.0;
  Matrix H;        // copy of the problem Hessian
  Matrix A;
  Vector b;
  Vector g;
  BlockPartition blocks;
  Matrix H_beta;   // H + βAᵀA
  Matrix saddle;   // [H_β −Aᵀ; βA 0]
  Vector q;        // [βAᵀb − g; βb]
  Vector chi_offset;  // βAᵀb − g
  Matrix D;        // block diagonal of H_β
  Matrix L;        // minus the strict block-lower part of H_β
  Cholesky H_beta_factor;
  Cholesky schur_factor;  // A H_β⁻¹ Aᵀ
  std::vector<Cholesky> block_factors;

  std::size_t dim() const noexcept { return H.rows(); }
  std::size_t constraints() const noexcept { return A.rows(); }
};

inline AugmentedSystem build_augmented(const QpProblem& p, double beta) {
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::InvalidArgument, "beta must be positive");
  AugmentedSystem s;
  s.beta = beta;
  s.H = p.H();
  s.A = p.A();
  s.b = p.b();
  s.g = p.g();
  s.blocks = p.blocks();
  const Matrix at = p.A().transpose();
  s.H_beta = p.H() + beta * (at * p.A());
  // Symmetrize exactly; the product above is symmetric only up to rounding.
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < i; ++j) s.H_beta(j, i) = s.H_beta(i, j);
  const std::size_t m = p.constraints();
  s.saddle = assemble_2x2(s.H_beta, -1.0 * at, beta * p.A(), Matrix(m, m));
  s.chi_offset = beta * transpose_times(p.A(), p.b()) - p.g();
  s.q = Vector::concat(s.chi_offset, beta * p.b());
  auto split = block_split(s.H_beta, s.blocks);
  s.D = std::move(split.D);
  s.L = std::move(split.L);
  s.H_beta_factor = Cholesky(s.H_beta);
  Matrix schur = p.A() * s.H_beta_factor.solve(at);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) schur(j, i) = schur(i, j) = 0.5 * (schur(i, j) + schur(j, i));
  try {
    s.schur_factor = Cholesky(schur);
  } catch (const Error&) {
    throw Error(ErrorKind::RankDeficient, "saddle matrix is singular: A H_beta^-1 A^T is not SPD");
  }
  s.block_factors = factor_diagonal_blocks(s.H_beta, s.blocks);
  return s;
}

// χ = Aᵀμ + βAᵀb − g
inline Vector chi(const AugmentedSystem& sys, const Vector& mu) {
  require(mu.size() == sys.constraints(), ErrorKind::DimensionMismatch, "chi: mu length");
  return transpose_times(sys.A, mu) + sys.chi_offset;
}

// Direct solve of the saddle system through the Schur complement A H_β⁻¹ Aᵀ.
inline PrimalDualPoint solve_saddle(const AugmentedSystem& sys) {
  const Vector base = sys.H_beta_factor.solve(sys.chi_offset);
  const Vector mu = sys.schur_factor.solve(sys.b - sys.A * base);
  const Vector x = sys.H_beta_factor.solve(sys.chi_offset + transpose_times(sys.A, mu));
  return {x, mu};
}

inline ResidualReport residuals(const QpProblem& p, const AugmentedSystem& sys, const PrimalDualPoint& z) {
  require(z.x.size() == p.dim() && z.mu.size() == p.constraints(), ErrorKind::DimensionMismatch,
          "residuals: point dimensions");
  ResidualReport r;
  r.primal = (p.A() * z.x - p.b()).norm();
  r.dual = (p.H() * z.x + p.g() - transpose_times(p.A(), z.mu)).norm();
  r.combined = (sys.saddle * z.stacked() - sys.q).norm();
  return r;
}

inline bool is_eps_accurate(const ResidualReport& r, double eps) {
  require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
  return r.primal <= eps && r.dual <= eps;
}

struct DiagonalNormalization {
  Matrix Htilde;  // D^{-1/2} H_β D^{-1/2}
  Matrix scale;   // D^{-1/2}
};

inline DiagonalNormalization diag_normalize(const AugmentedSystem& sys) {
  const std::size_t d = sys.dim();
  Matrix scale(d, d);
  for (std::size_t b = 0; b < sys.blocks.count(); ++b) {
    const std::size_t off = sys.blocks.offset(b);
    const std::size_t sz = sys.blocks.size(b);
    scale.set_block(off, off, spd_inverse_sqrt(sys.D.block(off, off, sz, sz)));
  }
  Matrix ht = scale * sys.H_beta * scale;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) ht(i, j) = ht(j, i) = 0.5 * (ht(i, j) + ht(j, i));
  return {std::move(ht), std::move(scale)};
}

}  // namespace ialm
