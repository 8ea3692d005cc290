#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/inner_solvers.hpp"
#include "ialm/linalg.hpp"
#include "ialm/outer_loop.hpp"
#include "ialm/qp_model.hpp"
#include "ialm/tolerances.hpp"

namespace ialm {

enum class IterationRole { G_beta, F_beta, G_admm, G_beta_P, G_bar, script_L_omega_P };

constexpr std::string_view to_string(IterationRole r) {
  switch (r) {
    case IterationRole::G_beta: return "G_beta";
    case IterationRole::F_beta: return "F_beta";
    case IterationRole::G_admm: return "G_admm";
    case IterationRole::G_beta_P: return "G_beta_P";
    case IterationRole::G_bar: return "G_bar";
    case IterationRole::script_L_omega_P: return "script_L_omega_P";
  }
  return "unknown";
}

struct IterationMatrix {
  Matrix matrix;
  IterationRole role = IterationRole::G_beta;
  double beta = 0.0;
  std::optional<Permutation> permutation;
  Spectrum spectrum;

  double spectral_radius() const noexcept { return spectrum.spectral_radius; }
};

namespace detail {

inline IterationMatrix finish(Matrix m, IterationRole role, double beta, std::optional<Permutation> perm = {}) {
  Spectrum s = general_spectrum(m);
  return {std::move(m), role, beta, std::move(perm), std::move(s)};
}

inline Matrix block_lower_solve(const Matrix& m, const BlockPartition& blocks, const std::vector<Cholesky>& factors,
                                const Matrix& rhs) {
  Matrix out(rhs.rows(), rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) out.set_column(c, ialm::block_lower_solve(m, blocks, factors, rhs.column(c)));
  return out;
}

// Pieces of the block Gauss-Seidel fixed-point form of one ADMM sweep,
// with the blocks visited in the order given by a block permutation.
struct SweepForm {
  Permutation scalar;  // P acting on x
  Matrix BP;           // P H_β Pᵀ
  BlockPartition blocks;
  std::vector<Cholesky> factors;
};

inline SweepForm sweep_form(const AugmentedSystem& sys, const Permutation& block_order) {
  SweepForm f{sys.blocks.expand(block_order), Matrix(), sys.blocks.permuted(block_order), {}};
  f.BP = apply_permutation(f.scalar, sys.H_beta, PermuteSide::Similarity);
  f.factors = factor_diagonal_blocks(f.BP, f.blocks);
  return f;
}

// Applies diag(Pᵀ, I) [D_P − L_P 0; βAPᵀ I]⁻¹ to the columns of a stacked right-hand side.
inline Matrix sweep_apply(const AugmentedSystem& sys, const SweepForm& f, const Matrix& rhs) {
  const std::size_t d = sys.dim();
  const std::size_t m = sys.constraints();
  const Matrix top = block_lower_solve(f.BP, f.blocks, f.factors, rhs.block(0, 0, d, rhs.cols()));
  const Matrix APt = apply_permutation(f.scalar, sys.A, PermuteSide::Cols);
  Matrix bottom = rhs.block(d, 0, m, rhs.cols()) - sys.beta * (APt * top);
  Matrix out(d + m, rhs.cols());
  out.set_block(0, 0, apply_permutation(f.scalar.inverse(), top, PermuteSide::Rows));
  out.set_block(d, 0, bottom);
  return out;
}

}  // namespace detail

// G_β = F_β [0 Aᵀ; 0 I] and F_β = [H_β⁻¹ 0; −βAH_β⁻¹ I].
inline std::pair<IterationMatrix, IterationMatrix> build_G_F(const AugmentedSystem& sys) {
  const std::size_t d = sys.dim();
  const std::size_t m = sys.constraints();
  const Matrix Hinv = sys.H_beta_factor.inverse();
  const Matrix F = assemble_2x2(Hinv, Matrix(d, m), -sys.beta * (sys.A * Hinv), Matrix::identity(m));
  const Matrix N = assemble_2x2(Matrix(d, d), sys.A.transpose(), Matrix(m, d), Matrix::identity(m));
  return {detail::finish(F * N, IterationRole::G_beta, sys.beta), detail::finish(F, IterationRole::F_beta, sys.beta)};
}

// ρ(G_β) from the symmetric block I − βAH_β⁻¹Aᵀ; the remaining eigenvalues are zero.
inline double rho_G_beta_fast(const AugmentedSystem& sys) {
  const std::size_t m = sys.constraints();
  Matrix M = Matrix::identity(m) - sys.beta * (sys.A * sys.H_beta_factor.solve(sys.A.transpose()));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) M(i, j) = M(j, i) = 0.5 * (M(i, j) + M(j, i));
  return symmetric_eigenvalues(M).spectral_radius;
}

// G_β^P = diag(Pᵀ, I) [D_P − L_P 0; βAPᵀ I]⁻¹ [L_PᵀP  PAᵀ; 0 I] for a block visiting order.
inline IterationMatrix build_G_beta_P(const AugmentedSystem& sys, const Permutation& block_order) {
  require(block_order.order() == sys.blocks.count(), ErrorKind::DimensionMismatch, "block permutation order");
  const std::size_t d = sys.dim();
  const std::size_t m = sys.constraints();
  const auto f = detail::sweep_form(sys, block_order);
  const BlockSplit split = block_split(f.BP, f.blocks);
  const Matrix LtP = split.L.transpose() * f.scalar.as_matrix();
  const Matrix PAt = apply_permutation(f.scalar, sys.A.transpose(), PermuteSide::Rows);
  const Matrix N = assemble_2x2(LtP, PAt, Matrix(m, d), Matrix::identity(m));
  const bool identity = block_order.is_identity();
  return detail::finish(detail::sweep_apply(sys, f, N), identity ? IterationRole::G_admm : IterationRole::G_beta_P,
                        sys.beta, block_order);
}

inline IterationMatrix build_G_admm(const AugmentedSystem& sys) {
  IterationMatrix g = build_G_beta_P(sys, Permutation::identity(sys.blocks.count()));
  g.role = IterationRole::G_admm;
  return g;
}

// Constant term c of the affine map z ↦ G_β^P z + c for one sweep.
inline Vector sweep_offset(const AugmentedSystem& sys, const Permutation& block_order) {
  const auto f = detail::sweep_form(sys, block_order);
  const Vector q = Vector::concat(f.scalar.apply(sys.chi_offset), sys.beta * sys.b);
  Matrix rhs(q.size(), 1);
  rhs.set_column(0, q);
  return detail::sweep_apply(sys, f, rhs).column(0);
}

// Uniform average of G_β^P over all block permutations.
inline IterationMatrix expected_iteration_matrix(const AugmentedSystem& sys) {
  const std::size_t n = sys.blocks.count();
  require(n <= Tolerances::max_enumeration_order, ErrorKind::TooManyBlocks,
          "expected_iteration_matrix: too many blocks to enumerate");
  const std::size_t N = sys.dim() + sys.constraints();
  Matrix sum(N, N);
  std::size_t count = 0;
  Permutation P = Permutation::identity(n);
  do {
    sum += build_G_beta_P(sys, P).matrix;
    ++count;
  } while (P.advance());
  sum *= 1.0 / static_cast<double>(count);
  return detail::finish(std::move(sum), IterationRole::G_bar, sys.beta);
}

// 𝓛_ω^P = I − ωPᵀ(D_P − ωL_P)⁻¹PB for a scalar ordering P.
inline Matrix script_L(const Matrix& B, double omega, const Permutation& P) {
  const std::size_t n = B.rows();
  require(B.is_square() && P.order() == n, ErrorKind::DimensionMismatch, "script_L dimensions");
  const Matrix BP = apply_permutation(P, B, PermuteSide::Similarity);
  const Matrix PB = apply_permutation(P, B, PermuteSide::Rows);
  Matrix Y(n, n);  // (D_P − ωL_P)⁻¹ PB by forward substitution
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double s = PB(i, c);
      for (std::size_t j = 0; j < i; ++j) s -= omega * BP(i, j) * Y(j, c);
      Y(i, c) = s / BP(i, i);
    }
  Matrix out = Matrix::identity(n);
  const Permutation inv = P.inverse();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) out(i, c) -= omega * Y(inv[i], c);
  return out;
}

struct PermutationRadius {
  Permutation permutation;
  double radius = 0.0;
};

// ρ(𝓛_ω^P) for every scalar ordering, in lexicographic order of P.
inline std::vector<PermutationRadius> permutation_scan(const Matrix& B, double omega, std::size_t threads = 1) {
  const std::size_t n = B.rows();
  require(B.is_square(), ErrorKind::DimensionMismatch, "permutation_scan: square matrix required");
  require(n <= Tolerances::max_enumeration_order, ErrorKind::TooLarge, "permutation_scan: order too large");
  require(omega > 0.0 && omega < 2.0, ErrorKind::InvalidArgument, "omega must lie in (0, 2)");
  for (std::size_t i = 0; i < n; ++i)
    require(B(i, i) > 0.0, ErrorKind::SingularBlock, "permutation_scan: nonpositive diagonal");
  std::vector<PermutationRadius> out;
  Permutation P = Permutation::identity(n);
  do out.push_back({P, 0.0});
  while (P.advance());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < out.size(); i += stride)
      out[i].radius = spectral_radius(script_L(B, omega, out[i].permutation));
  };
  threads = std::max<std::size_t>(1, std::min(threads, out.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

inline double cg_rate(double kappa) {
  require(kappa >= 1.0 - 1e-12, ErrorKind::InvalidArgument, "condition number below one");
  const double s = std::sqrt(std::max(kappa, 1.0));
  return (s - 1.0) / (s + 1.0);
}

// Per-sweep energy-norm contraction of cyclic SOR; λ₁ is the largest eigenvalue.
inline double sor_rate(double omega, double lambda_max, double kappa, std::size_t d) {
  require(omega > 0.0 && omega < 2.0 && d >= 1, ErrorKind::InvalidArgument, "sor_rate arguments");
  const double lg = std::floor(std::log2(2.0 * static_cast<double>(d)));
  const double den = 1.0 + 0.5 * lg * omega * lambda_max;
  return 1.0 - (2.0 - omega) * omega * lambda_max / (den * den * kappa);
}

// Expected per-sweep contraction of the randomly shuffled variant.
inline double rssor_rate(double omega, double lambda_max, double kappa) {
  require(omega > 0.0 && omega < 2.0, ErrorKind::InvalidArgument, "rssor_rate arguments");
  const double den = 1.0 + omega * lambda_max;
  return 1.0 - (2.0 - omega) * omega * lambda_max / (den * den * kappa);
}

struct TheoreticalBounds {
  double rho_beta = 0.0;
  double norm_A = 0.0;     // ‖𝓐‖ of the saddle matrix
  double norm_Ainv = 0.0;  // ‖𝓐⁻¹‖
  double norm_F = 0.0;
  double norm_At = 0.0;    // ‖Aᵀ‖ of the constraint matrix
  double d0 = 0.0;         // ‖𝓐z⁰ − q‖
  double C_bar_exact = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C_bar = 0.0;
  std::optional<double> L_cor;  // needs ρ_β < R
  double kappa_H_beta = 0.0;
  double kappa_H_tilde = 0.0;
  double kappa_D_inv = 0.0;
  double lambda_max_H_tilde = 0.0;
  double cg_rate = 0.0;
  double sor_rate = 0.0;
  double rssor_rate = 0.0;
  std::optional<std::size_t> j_bar_estimate;

  double k2_saddle() const noexcept { return norm_A * norm_Ainv; }
};

namespace detail {

inline std::optional<std::size_t> log_ceiling(double rate, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) return std::nullopt;
  if (c >= 1.0) return std::size_t{1};
  if (!(rate > 0.0) || rate >= 1.0) return rate <= 0.0 ? std::optional<std::size_t>(1) : std::nullopt;
  const double v = std::ceil(std::log(c) / std::log(rate));
  if (!std::isfinite(v) || v > 1e15) return std::nullopt;
  return static_cast<std::size_t>(std::max(1.0, v));
}

}  // namespace detail

// Evaluates the rate factors and bound constants for a system, forcing ratio R
// and inner solver. Norms are spectral norms.
inline TheoreticalBounds compute_bounds(const QpProblem& p, const AugmentedSystem& sys, const ForcingSequence& forcing,
                                        const InnerSolverSpec& spec, const std::optional<PrimalDualPoint>& z0 = {}) {
  forcing.validate();
  spec.validate();
  TheoreticalBounds t;
  const double beta = sys.beta;
  const double R = forcing.R;
  t.rho_beta = rho_G_beta_fast(sys);
  const auto sv = extreme_singular_values(sys.saddle);
  require(sv.min > Tolerances::singular_ratio * sv.max, ErrorKind::Singular, "saddle matrix is singular");
  t.norm_A = sv.max;
  t.norm_Ainv = 1.0 / sv.min;
  t.norm_F = spectral_norm(build_G_F(sys).second.matrix);
  t.norm_At = spectral_norm(sys.A);
  const PrimalDualPoint start = z0.value_or(PrimalDualPoint::zero(p));
  t.d0 = (sys.saddle * start.stacked() - sys.q).norm();
  const double k2 = t.k2_saddle();

  t.C_bar_exact = k2 * t.d0 / beta;
  t.C1 = 1.0 + t.norm_At;
  const double AF = t.norm_A * t.norm_F;
  if (R < t.rho_beta) {
    const double q = R / t.rho_beta;
    t.C2 = std::max(k2 * t.d0, q * AF / (1.0 - q));
  } else {
    t.C2 = std::max(k2 * t.d0, AF);
  }
  t.C_bar = std::max(t.C1 * t.C2, t.C2 / beta);
  if (t.rho_beta < R) t.L_cor = k2 * t.d0 + AF / (1.0 - t.rho_beta / R);

  const Spectrum hb = symmetric_eigenvalues(sys.H_beta);
  const double hb_max = std::abs(hb.eigenvalues.front().real());
  const double hb_min = std::abs(hb.eigenvalues.back().real());
  t.kappa_H_beta = hb_max / hb_min;
  const DiagonalNormalization dn = diag_normalize(sys);
  const Spectrum ht = symmetric_eigenvalues(dn.Htilde);
  t.lambda_max_H_tilde = ht.eigenvalues.front().real();
  t.kappa_H_tilde = t.lambda_max_H_tilde / ht.eigenvalues.back().real();
  t.kappa_D_inv = condition_number_2(sys.D);
  t.cg_rate = cg_rate(t.kappa_H_beta);
  const double omega = spec.omega;
  t.sor_rate = sor_rate(omega, t.lambda_max_H_tilde, t.kappa_H_tilde, sys.dim());
  t.rssor_rate = rssor_rate(omega, t.lambda_max_H_tilde, t.kappa_H_tilde);

  if (t.L_cor) {
    const double growth = 1.0 + t.norm_At * *t.L_cor;
    const double sk = std::sqrt(t.kappa_H_tilde * t.kappa_D_inv);
    switch (spec.method) {
      case InnerMethod::CG:
        t.j_bar_estimate = detail::log_ceiling(t.cg_rate, R / (2.0 * std::sqrt(t.kappa_H_beta) * growth));
        break;
      case InnerMethod::SOR:
        t.j_bar_estimate = detail::log_ceiling(t.sor_rate, 2.0 * R / (sk * growth));
        break;
      case InnerMethod::RSSOR:
        t.j_bar_estimate = detail::log_ceiling(t.rssor_rate, 2.0 * R / (sk * growth));
        break;
      case InnerMethod::Direct:
        break;
    }
  }
  return t;
}

// Envelope C̄ρ_β^k for ‖Ax^k − b‖ of the exact method, C̄ = k₂(𝓐)‖d⁰‖/β.
inline std::vector<double> exact_primal_envelope(const TheoreticalBounds& t, double beta, std::size_t iterations) {
  std::vector<double> e(iterations + 1);
  const double c = t.k2_saddle() * t.d0 / beta;
  for (std::size_t k = 0; k <= iterations; ++k) e[k] = c * std::pow(t.rho_beta, static_cast<double>(k));
  return e;
}

// Right-hand side k₂(𝓐)‖d⁰‖ρ^k + ‖𝓐‖‖F_β‖ Σ_{j<k} ρ^{k−1−j}‖r^j‖ for every record of
// an inexact run, where r^j is the inner residual that produced iterate j+1.
inline std::vector<double> inexact_residual_envelope(const TheoreticalBounds& t, const SolveTrace& trace) {
  std::vector<double> e(trace.records.size());
  const double lead = t.k2_saddle() * trace.records.front().residuals.combined;
  const double AF = t.norm_A * t.norm_F;
  double acc = 0.0;  // Σ_{j<k} ρ^{k−1−j}‖r^j‖
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (k > 0) acc = t.rho_beta * acc + trace.records[k].residuals.inner_residual;
    e[k] = lead * std::pow(t.rho_beta, static_cast<double>(k)) + AF * acc;
  }
  return e;
}

// Smallest β (to bisection accuracy on log β) with ρ(G_β) ≤ target.
inline double tune_beta(const QpProblem& p, double target_rho, double lo = 1e-8, double hi = 1e8) {
  require(target_rho > 0.0 && target_rho < 1.0, ErrorKind::InvalidArgument, "target rho must lie in (0, 1)");
  auto rho = [&](double beta) { return rho_G_beta_fast(build_augmented(p, beta)); };
  require(rho(hi) <= target_rho, ErrorKind::NoConvergence, "target rho not reached at the largest beta");
  if (rho(lo) <= target_rho) return lo;
  double a = std::log(lo);
  double b = std::log(hi);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (a + b);
    if (rho(std::exp(mid)) <= target_rho)
      b = mid;
    else
      a = mid;
  }
  return std::exp(b);
}

}  // namespace ialm
