#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/linalg.hpp"
#include "ialm/qp_model.hpp"
#include "ialm/random.hpp"
#include "ialm/tolerances.hpp"

namespace ialm {

enum class InnerMethod { Direct, CG, SOR, RSSOR };
enum class StopMode { ResidualTarget, FixedSweeps };
enum class WarmStart { PreviousOuterIterate, Zero };

struct InnerSolverSpec {
  InnerMethod method = InnerMethod::Direct;
  double omega = 1.0;
  StopMode stop = StopMode::ResidualTarget;
  std::size_t sweeps = 1;
  std::size_t max_iters = Tolerances::inner_max_iterations;
  WarmStart warm_start = WarmStart::PreviousOuterIterate;

  void validate() const {
    require(omega > 0.0 && omega < 2.0, ErrorKind::InvalidArgument, "omega must lie in (0, 2)");
    require(sweeps >= 1, ErrorKind::InvalidArgument, "sweeps must be at least 1");
    require(max_iters >= 1, ErrorKind::InvalidArgument, "max_iters must be at least 1");
  }

  static InnerSolverSpec direct() { return {}; }
  static InnerSolverSpec cg() { return {.method = InnerMethod::CG}; }
  static InnerSolverSpec gauss_seidel_sweeps(std::size_t n) {
    return {.method = InnerMethod::SOR, .omega = 1.0, .stop = StopMode::FixedSweeps, .sweeps = n};
  }
  static InnerSolverSpec shuffled_gauss_seidel_sweeps(std::size_t n) {
    return {.method = InnerMethod::RSSOR, .omega = 1.0, .stop = StopMode::FixedSweeps, .sweeps = n};
  }
};

struct InnerReport {
  Vector solution;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool hit_cap = false;
  std::optional<std::vector<Permutation>> permutation_log;
};

inline double inner_residual_norm(const AugmentedSystem& sys, const Vector& x, const Vector& rhs) {
  return (sys.H_beta * x - rhs).norm();
}

// Conjugate gradients on H_β x = χ from x0, stopping at the first iterate whose
// true residual norm is at most target, or after cap steps.
inline InnerReport cg_solve(const AugmentedSystem& sys, const Vector& rhs, const Vector& x0, double target,
                            std::size_t cap) {
  require(target >= 0.0, ErrorKind::InvalidArgument, "cg target must be non-negative");
  require(rhs.size() == sys.dim() && x0.size() == sys.dim(), ErrorKind::DimensionMismatch, "cg dimensions");
  const Matrix& B = sys.H_beta;
  InnerReport rep;
  Vector x = x0;
  Vector r = rhs - B * x;  // negative residual: χ − Bx
  Vector p = r;
  double rr = r.dot(r);
  std::size_t j = 0;
  while (true) {
    double rnorm = std::sqrt(rr);
    if (rnorm <= target) {
      // Confirm with the unrecursed residual before accepting.
      r = rhs - B * x;
      rr = r.dot(r);
      rnorm = std::sqrt(rr);
      if (rnorm <= target) break;
      p = r;
    }
    if (j >= cap) {
      rep.hit_cap = true;
      break;
    }
    const Vector bp = B * p;
    const double pbp = p.dot(bp);
    if (!(pbp > 0.0)) {
      if (rr == 0.0) break;
      throw Error(ErrorKind::Breakdown, "cg: non-positive curvature pᵀH_βp");
    }
    const double alpha = rr / pbp;
    x.axpy(alpha, p);
    ++j;
    if (j % Tolerances::cg_recompute_every == 0) {
      r = rhs - B * x;
    } else {
      r.axpy(-alpha, bp);
    }
    const double rr_new = r.dot(r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  rep.iterations = j;
  rep.final_residual = inner_residual_norm(sys, x, rhs);
  rep.solution = std::move(x);
  return rep;
}

// One block SOR sweep visiting the blocks of sys.blocks in the given order.
inline Vector sor_sweep_ordered(const AugmentedSystem& sys, const Vector& rhs, Vector x, double omega,
                                const Permutation& block_order) {
  require(omega > 0.0 && omega < 2.0, ErrorKind::InvalidArgument, "omega must lie in (0, 2)");
  require(rhs.size() == sys.dim() && x.size() == sys.dim(), ErrorKind::DimensionMismatch, "sor dimensions");
  require(block_order.order() == sys.blocks.count(), ErrorKind::DimensionMismatch, "sor block order");
  const Matrix& B = sys.H_beta;
  const std::size_t d = sys.dim();
  for (std::size_t pos = 0; pos < block_order.order(); ++pos) {
    const std::size_t blk = block_order[pos];
    const std::size_t off = sys.blocks.offset(blk);
    const std::size_t sz = sys.blocks.size(blk);
    Vector r(sz);
    for (std::size_t i = 0; i < sz; ++i) {
      const auto row = B.row(off + i);
      double s = rhs[off + i];
      for (std::size_t j = 0; j < off; ++j) s -= row[j] * x[j];
      for (std::size_t j = off + sz; j < d; ++j) s -= row[j] * x[j];
      r[i] = s;
    }
    const Vector y = sys.block_factors[blk].solve(r);
    for (std::size_t i = 0; i < sz; ++i) x[off + i] = (1.0 - omega) * x[off + i] + omega * y[i];
  }
  return x;
}

inline Vector sor_sweep(const AugmentedSystem& sys, const Vector& rhs, const Vector& x, double omega) {
  return sor_sweep_ordered(sys, rhs, x, omega, Permutation::identity(sys.blocks.count()));
}

struct ShuffledSweep {
  Vector x;
  Permutation order;
};

// SOR sweep in a fresh uniformly random block order drawn from rng.
inline ShuffledSweep rssor_sweep(const AugmentedSystem& sys, const Vector& rhs, const Vector& x, double omega,
                                 Rng& rng) {
  Permutation order = Permutation::random(sys.blocks.count(), rng);
  Vector next = sor_sweep_ordered(sys, rhs, x, omega, order);
  return {std::move(next), std::move(order)};
}

inline InnerReport iterative_solve(const AugmentedSystem& sys, const Vector& rhs, const Vector& x0,
                                   const InnerSolverSpec& spec, double target, Rng& rng) {
  spec.validate();
  require(rhs.size() == sys.dim() && x0.size() == sys.dim(), ErrorKind::DimensionMismatch,
          "iterative_solve dimensions");
  const bool fixed = spec.stop == StopMode::FixedSweeps;
  switch (spec.method) {
    case InnerMethod::Direct: {
      InnerReport rep;
      rep.solution = sys.H_beta_factor.solve(rhs);
      rep.final_residual = inner_residual_norm(sys, rep.solution, rhs);
      return rep;
    }
    case InnerMethod::CG: {
      if (!fixed) return cg_solve(sys, rhs, x0, target, spec.max_iters);
      // Exactly `sweeps` CG steps: a zero target never triggers early exit
      // unless the residual vanishes.
      InnerReport rep = cg_solve(sys, rhs, x0, 0.0, spec.sweeps);
      rep.hit_cap = false;
      return rep;
    }
    case InnerMethod::SOR:
    case InnerMethod::RSSOR: {
      const bool shuffled = spec.method == InnerMethod::RSSOR;
      InnerReport rep;
      if (shuffled) rep.permutation_log.emplace();
      Vector x = x0;
      const std::size_t limit = fixed ? spec.sweeps : spec.max_iters;
      std::size_t j = 0;
      double res = fixed ? 0.0 : inner_residual_norm(sys, x, rhs);
      while (j < limit && (fixed || res > target)) {
        if (shuffled) {
          auto step = rssor_sweep(sys, rhs, x, spec.omega, rng);
          x = std::move(step.x);
          rep.permutation_log->push_back(std::move(step.order));
        } else {
          x = sor_sweep(sys, rhs, x, spec.omega);
        }
        ++j;
        if (!fixed) res = inner_residual_norm(sys, x, rhs);
      }
      rep.iterations = j;
      rep.final_residual = inner_residual_norm(sys, x, rhs);
      rep.hit_cap = !fixed && rep.final_residual > target;
      rep.solution = std::move(x);
      return rep;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown inner method");
}

}  // namespace ialm
