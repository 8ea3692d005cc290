#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/inner_solvers.hpp"
#include "ialm/linalg.hpp"
#include "ialm/qp_model.hpp"
#include "ialm/random.hpp"
#include "ialm/tolerances.hpp"

namespace ialm {

// Inner residual targets η^k = scale · R^{k+1}.
struct ForcingSequence {
  double R = 0.5;
  double scale = 1.0;

  void validate() const {
    require(R > 0.0 && R < 1.0, ErrorKind::InvalidArgument, "forcing ratio R must lie in (0, 1)");
    require(scale > 0.0, ErrorKind::InvalidArgument, "forcing scale must be positive");
  }
  double eta(std::size_t k) const { return scale * std::pow(R, static_cast<double>(k + 1)); }
};

struct OuterConfig {
  double beta = 1.0;
  std::size_t max_outer = 1000;
  double eps = 1e-8;
  ForcingSequence forcing;
  InnerSolverSpec inner;
  std::uint64_t seed = 42;
  // Replaces the forcing scale by max(1, ‖d⁰‖).
  bool forcing_scale_from_d0 = false;
  bool record_iterates = false;
  bool record_permutations = false;
  std::optional<PrimalDualPoint> start;

  void validate() const {
    require(beta > 0.0, ErrorKind::InvalidArgument, "beta must be positive");
    require(max_outer >= 1, ErrorKind::InvalidArgument, "max_outer must be positive");
    require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
    forcing.validate();
    inner.validate();
  }
};

enum class TraceStatus { Converged, MaxOuterReached, Diverged };

constexpr std::string_view to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::Converged: return "converged";
    case TraceStatus::MaxOuterReached: return "max_outer_reached";
    case TraceStatus::Diverged: return "diverged";
  }
  return "unknown";
}

// Record k describes the iterate (x^k, μ^k); for k >= 1 the inner fields
// describe the solve that produced it (target η^{k-1}, j̄^{k-1} sweeps).
struct IterationRecord {
  std::size_t k = 0;
  ResidualReport residuals;
  double eta = 0.0;
  std::size_t inner_iterations = 0;
  bool inner_hit_cap = false;
  double elapsed_seconds = 0.0;
};

struct SolveTrace {
  std::vector<IterationRecord> records;
  TraceStatus status = TraceStatus::MaxOuterReached;
  PrimalDualPoint final_point;
  std::vector<PrimalDualPoint> iterates;                 // when record_iterates
  std::vector<std::vector<Permutation>> permutations;    // per outer step, when record_permutations
};

namespace detail {

struct StepResult {
  Vector x;
  std::size_t iterations = 0;
  double inner_residual = 0.0;
  bool hit_cap = false;
  double eta = 0.0;
  std::vector<Permutation> permutations;
};

template <class Step>
SolveTrace run_outer(const QpProblem& p, const AugmentedSystem& sys, const OuterConfig& cfg, Step&& step) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  SolveTrace trace;
  PrimalDualPoint z = cfg.start.value_or(PrimalDualPoint::zero(p));
  require(z.x.size() == p.dim() && z.mu.size() == p.constraints(), ErrorKind::DimensionMismatch,
          "start point dimensions");

  auto push = [&](std::size_t k, const StepResult* s) {
    IterationRecord rec;
    rec.k = k;
    rec.residuals = residuals(p, sys, z);
    if (s != nullptr) {
      rec.residuals.inner_residual = s->inner_residual;
      rec.eta = s->eta;
      rec.inner_iterations = s->iterations;
      rec.inner_hit_cap = s->hit_cap;
    }
    rec.elapsed_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    trace.records.push_back(rec);
    if (cfg.record_iterates) trace.iterates.push_back(z);
    const double c = rec.residuals.combined;
    if (!std::isfinite(c) || c > Tolerances::divergence_threshold) {
      trace.status = TraceStatus::Diverged;
      return true;
    }
    if (rec.residuals.primal <= cfg.eps && rec.residuals.dual <= cfg.eps) {
      trace.status = TraceStatus::Converged;
      return true;
    }
    if (k >= cfg.max_outer) {
      trace.status = TraceStatus::MaxOuterReached;
      return true;
    }
    return false;
  };

  bool done = push(0, nullptr);
  for (std::size_t k = 0; !done; ++k) {
    StepResult s = step(z, k);
    z.mu -= sys.beta * (p.A() * s.x - p.b());
    z.x = std::move(s.x);
    if (cfg.record_permutations) trace.permutations.push_back(std::move(s.permutations));
    done = push(k + 1, &s);
  }
  trace.final_point = std::move(z);
  return trace;
}

// Minimizes the augmented Lagrangian over one block with the others frozen.
inline void lagrangian_block_update(const QpProblem& p, const AugmentedSystem& sys, Vector& x, const Vector& mu,
                                    std::size_t blk) {
  const Matrix& H = p.H();
  const Matrix& A = p.A();
  const std::size_t off = sys.blocks.offset(blk);
  const std::size_t sz = sys.blocks.size(blk);
  const std::size_t d = p.dim();
  const std::size_t m = p.constraints();
  // t = μ − β(A x_{−I} − b)
  Vector t(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto row = A.row(r);
    double w = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      if (j < off || j >= off + sz) w += row[j] * x[j];
    t[r] = mu[r] - sys.beta * (w - p.b()[r]);
  }
  Vector rhs(sz);
  for (std::size_t i = 0; i < sz; ++i) {
    const std::size_t gi = off + i;
    double s = -p.g()[gi];
    for (std::size_t r = 0; r < m; ++r) s += A(r, gi) * t[r];
    const auto hrow = H.row(gi);
    for (std::size_t j = 0; j < d; ++j)
      if (j < off || j >= off + sz) s -= hrow[j] * x[j];
    rhs[i] = s;
  }
  x.set_segment(off, sys.block_factors[blk].solve(rhs));
}

}  // namespace detail

inline double forcing_scale(const OuterConfig& cfg, const QpProblem& p, const AugmentedSystem& sys) {
  if (!cfg.forcing_scale_from_d0) return cfg.forcing.scale;
  const PrimalDualPoint z0 = cfg.start.value_or(PrimalDualPoint::zero(p));
  return std::max(1.0, residuals(p, sys, z0).combined);
}

// Exact augmented Lagrangian method: every primal step is a direct solve with H_β.
inline SolveTrace alm_exact(const QpProblem& p, const OuterConfig& cfg) {
  cfg.validate();
  require(cfg.inner.method == InnerMethod::Direct, ErrorKind::InvalidArgument,
          "alm_exact requires the direct inner method");
  const AugmentedSystem sys = build_augmented(p, cfg.beta);
  return detail::run_outer(p, sys, cfg, [&](const PrimalDualPoint& z, std::size_t) {
    detail::StepResult s;
    const Vector rhs = chi(sys, z.mu);
    s.x = sys.H_beta_factor.solve(rhs);
    s.inner_residual = inner_residual_norm(sys, s.x, rhs);
    return s;
  });
}

// Inexact ALM: the primal step is an inner solve of H_β x = χ^k to target η^k
// (or a fixed number of sweeps), warm-started per cfg.inner.warm_start.
inline SolveTrace ialm_run(const QpProblem& p, const OuterConfig& cfg, Rng& rng) {
  cfg.validate();
  const AugmentedSystem sys = build_augmented(p, cfg.beta);
  ForcingSequence forcing = cfg.forcing;
  forcing.scale = forcing_scale(cfg, p, sys);
  return detail::run_outer(p, sys, cfg, [&](const PrimalDualPoint& z, std::size_t k) {
    const Vector rhs = chi(sys, z.mu);
    const Vector x0 = cfg.inner.warm_start == WarmStart::PreviousOuterIterate ? z.x : Vector(p.dim());
    const double target = forcing.eta(k);
    InnerReport rep = iterative_solve(sys, rhs, x0, cfg.inner, target, rng);
    detail::StepResult s;
    s.x = std::move(rep.solution);
    s.iterations = rep.iterations;
    s.inner_residual = rep.final_residual;
    s.hit_cap = rep.hit_cap;
    s.eta = cfg.inner.stop == StopMode::ResidualTarget && cfg.inner.method != InnerMethod::Direct ? target : 0.0;
    if (rep.permutation_log) s.permutations = std::move(*rep.permutation_log);
    return s;
  });
}

// n-block ADMM: cyclic block minimization of the augmented Lagrangian, then a dual step.
inline SolveTrace admm_run(const QpProblem& p, const OuterConfig& cfg) {
  cfg.validate();
  const AugmentedSystem sys = build_augmented(p, cfg.beta);
  return detail::run_outer(p, sys, cfg, [&](const PrimalDualPoint& z, std::size_t) {
    detail::StepResult s;
    s.x = z.x;
    for (std::size_t blk = 0; blk < sys.blocks.count(); ++blk) detail::lagrangian_block_update(p, sys, s.x, z.mu, blk);
    s.iterations = 1;
    s.inner_residual = inner_residual_norm(sys, s.x, chi(sys, z.mu));
    return s;
  });
}

// Randomized ADMM: the block order is redrawn uniformly at every outer step.
inline SolveTrace radmm_run(const QpProblem& p, const OuterConfig& cfg, Rng& rng) {
  cfg.validate();
  const AugmentedSystem sys = build_augmented(p, cfg.beta);
  return detail::run_outer(p, sys, cfg, [&](const PrimalDualPoint& z, std::size_t) {
    detail::StepResult s;
    s.x = z.x;
    Permutation order = Permutation::random(sys.blocks.count(), rng);
    for (std::size_t pos = 0; pos < order.order(); ++pos)
      detail::lagrangian_block_update(p, sys, s.x, z.mu, order[pos]);
    s.iterations = 1;
    s.inner_residual = inner_residual_norm(sys, s.x, chi(sys, z.mu));
    s.permutations.push_back(std::move(order));
    return s;
  });
}

struct SeriesStats {
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Linear-interpolation quantiles of a sample.
inline SeriesStats summarize(std::vector<double> v) {
  require(!v.empty(), ErrorKind::InvalidArgument, "summarize: empty sample");
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
  };
  SeriesStats s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  return s;
}

struct AggregateRow {
  std::size_t k = 0;
  std::size_t count = 0;  // trajectories that reached iteration k
  SeriesStats primal, dual, combined, inner_iterations;
};

struct MonteCarloResult {
  std::vector<SolveTrace> traces;
  std::vector<AggregateRow> rows;
};

inline std::vector<AggregateRow> aggregate(const std::vector<SolveTrace>& traces) {
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.records.size());
  std::vector<AggregateRow> rows;
  for (std::size_t k = 0; k < longest; ++k) {
    std::vector<double> pr, du, co, it;
    for (const auto& t : traces) {
      if (k >= t.records.size()) continue;
      const auto& r = t.records[k];
      pr.push_back(r.residuals.primal);
      du.push_back(r.residuals.dual);
      co.push_back(r.residuals.combined);
      it.push_back(static_cast<double>(r.inner_iterations));
    }
    rows.push_back({k, pr.size(), summarize(pr), summarize(du), summarize(co), summarize(it)});
  }
  return rows;
}

// Independent iALM trajectories; trajectory i draws from the stream
// (cfg.seed, trial i), so results do not depend on the thread count.
inline MonteCarloResult monte_carlo(const QpProblem& p, const OuterConfig& cfg, std::size_t trials,
                                    std::size_t threads = 1) {
  require(trials >= 1, ErrorKind::InvalidArgument, "trials must be positive");
  cfg.validate();
  MonteCarloResult out;
  out.traces.resize(trials);
  auto run_trial = [&](std::size_t i) {
    Rng rng = make_rng(cfg.seed, SeedStream::Trajectory, i);
    out.traces[i] = ialm_run(p, cfg, rng);
  };
  threads = std::clamp<std::size_t>(threads, 1, trials);
  if (threads == 1) {
    for (std::size_t i = 0; i < trials; ++i) run_trial(i);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < trials; i += threads) run_trial(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  out.rows = aggregate(out.traces);
  return out;
}

// ‖e^k‖ against a reference solution, for traces recorded with iterates.
inline std::vector<double> error_norms(const SolveTrace& trace, const PrimalDualPoint& reference) {
  std::vector<double> e;
  e.reserve(trace.iterates.size());
  const Vector ref = reference.stacked();
  for (const auto& z : trace.iterates) e.push_back((z.stacked() - ref).norm());
  return e;
}

}  // namespace ialm
