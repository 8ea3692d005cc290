#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/experiments/csv.hpp"
#include "ialm/experiments/libsvm.hpp"
#include "ialm/experiments/problems.hpp"
#include "ialm/outer_loop.hpp"
#include "ialm/spectral.hpp"

namespace ialm {

inline constexpr std::size_t heart_scale_features = 13;
inline constexpr const char* heart_scale_url =
    "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/heart_scale";

struct ProblemSource {
  enum class Kind { Problem1, Problem2, Random };
  Kind kind = Kind::Problem2;
  std::string path;
  KernelOptions kernel;
  std::size_t d = 0;
  std::size_t m = 0;
  std::uint64_t seed = 42;

  void validate() const {
    if (kind == Kind::Problem1) require(!path.empty(), ErrorKind::InvalidArgument, "problem1 needs a data file");
    if (kind == Kind::Random) require(d >= m && m >= 1, ErrorKind::InvalidArgument, "random problem needs d >= m >= 1");
  }
};

// "p1:<path>", "p2" or "random:<d>,<m>".
inline ProblemSource parse_problem_source(const std::string& text, std::uint64_t seed) {
  ProblemSource s;
  s.seed = seed;
  if (text == "p2") {
    s.kind = ProblemSource::Kind::Problem2;
  } else if (text.rfind("p1:", 0) == 0) {
    s.kind = ProblemSource::Kind::Problem1;
    s.path = text.substr(3);
  } else if (text.rfind("random:", 0) == 0) {
    s.kind = ProblemSource::Kind::Random;
    const std::string dims = text.substr(7);
    const auto comma = dims.find(',');
    require(comma != std::string::npos, ErrorKind::Parse, "random problem expects random:<d>,<m>");
    try {
      std::size_t used = 0;
      s.d = std::stoul(dims.substr(0, comma), &used);
      require(used == comma, ErrorKind::Parse, "bad d in " + text);
      const std::string ms = dims.substr(comma + 1);
      s.m = std::stoul(ms, &used);
      require(used == ms.size(), ErrorKind::Parse, "bad m in " + text);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, "bad dimensions in " + text);
    }
  } else {
    throw Error(ErrorKind::Parse, "unknown problem '" + text + "'");
  }
  s.validate();
  return s;
}

inline QpProblem build_problem(const ProblemSource& s) {
  s.validate();
  switch (s.kind) {
    case ProblemSource::Kind::Problem1:
      return build_problem1(parse_libsvm(s.path, heart_scale_features).features, s.seed, s.kernel);
    case ProblemSource::Kind::Problem2:
      return build_problem2(s.seed);
    case ProblemSource::Kind::Random:
      return build_random_problem(s.d, s.m, s.seed);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown problem kind");
}

struct ExperimentConfig {
  ProblemSource source;
  OuterConfig outer;
  std::optional<double> R;  // defaults to ρ_β + 0.01
  std::size_t trials = 15;
  std::vector<double> beta_grid;
  std::string output_dir = ".";
  std::size_t scan_matrices = 100;
  std::size_t scan_order = 7;
  double scan_omega = 1.0;
  std::size_t threads = 1;
};

struct ReproduceReport {
  std::vector<std::string> files;
  std::vector<std::string> notes;
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  require(lo > 0.0 && hi > lo && points >= 2, ErrorKind::InvalidArgument, "log_grid arguments");
  std::vector<double> g(points);
  const double a = std::log10(lo);
  const double step = (std::log10(hi) - a) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = std::pow(10.0, a + step * static_cast<double>(i));
  return g;
}

inline double default_forcing_ratio(double rho_beta) { return std::min(rho_beta + 0.01, 0.999); }

inline CsvTable spectra_table(const QpProblem& p, const std::vector<double>& betas) {
  require(!betas.empty(), ErrorKind::InvalidArgument, "beta grid is empty");
  CsvTable t{{"beta", "rho_G", "rho_G_admm", "cond_saddle", "cond_Hbeta"}, {}};
  for (double beta : betas) {
    const AugmentedSystem sys = build_augmented(p, beta);
    t.add(beta, build_G_F(sys).first.spectral_radius(), build_G_admm(sys).spectral_radius(),
          condition_number_2(sys.saddle), condition_number_2(sys.H_beta));
  }
  return t;
}

inline CsvTable permscan_table(const ExperimentConfig& cfg) {
  CsvTable t{{"matrix_id", "perm_index", "spectral_radius"}, {}};
  for (std::size_t i = 0; i < cfg.scan_matrices; ++i) {
    Rng rng = make_rng(cfg.source.seed, SeedStream::Matrix, i);
    const Matrix B = random_spd_uniform(cfg.scan_order, rng);
    const auto scan = permutation_scan(B, cfg.scan_omega, cfg.threads);
    for (std::size_t k = 0; k < scan.size(); ++k) t.add(i, k, scan[k].radius);
  }
  return t;
}

inline CsvTable bounds_table(const TheoreticalBounds& b) {
  auto opt = [](const auto& v) { return v ? CsvTable::cell(*v) : std::string(); };
  CsvTable t{{"rho_beta", "norm_A", "norm_Ainv", "norm_F", "norm_At", "d0", "C_bar_exact", "C1", "C2", "C_bar",
              "L_cor", "kappa_H_beta", "kappa_H_tilde", "kappa_D_inv", "lambda_max_H_tilde", "cg_rate", "sor_rate",
              "rssor_rate", "j_bar_estimate"},
             {}};
  t.rows.push_back({CsvTable::cell(b.rho_beta), CsvTable::cell(b.norm_A), CsvTable::cell(b.norm_Ainv),
                    CsvTable::cell(b.norm_F), CsvTable::cell(b.norm_At), CsvTable::cell(b.d0),
                    CsvTable::cell(b.C_bar_exact), CsvTable::cell(b.C1), CsvTable::cell(b.C2), CsvTable::cell(b.C_bar),
                    opt(b.L_cor), CsvTable::cell(b.kappa_H_beta), CsvTable::cell(b.kappa_H_tilde),
                    CsvTable::cell(b.kappa_D_inv), CsvTable::cell(b.lambda_max_H_tilde), CsvTable::cell(b.cg_rate),
                    CsvTable::cell(b.sor_rate), CsvTable::cell(b.rssor_rate), opt(b.j_bar_estimate)});
  return t;
}

namespace detail {

inline std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

inline void emit(ReproduceReport& rep, const ExperimentConfig& cfg, const std::string& name, const CsvTable& t) {
  const std::string path = out_path(cfg, name);
  write_csv(path, t);
  rep.files.push_back(path);
}

inline std::string status_note(const std::string& run, const SolveTrace& t) {
  return run + ": " + std::string(to_string(t.status)) + " after " + std::to_string(t.records.size() - 1) +
         " outer iterations, combined residual " + format_real(t.records.back().residuals.combined);
}

}  // namespace detail

inline ReproduceReport reproduce(const std::string& fig, const ExperimentConfig& cfg) {
  ReproduceReport rep;
  if (fig == "fig3") {
    detail::emit(rep, cfg, "permscan.csv", permscan_table(cfg));
    return rep;
  }
  const QpProblem p = build_problem(cfg.source);
  if (fig == "fig1") {
    const auto grid = cfg.beta_grid.empty() ? log_grid(1e-2, 1e3, 13) : cfg.beta_grid;
    detail::emit(rep, cfg, "spectra.csv", spectra_table(p, grid));
    return rep;
  }
  const double beta = cfg.outer.beta;
  const AugmentedSystem sys = build_augmented(p, beta);
  const double rho = rho_G_beta_fast(sys);
  OuterConfig base = cfg.outer;
  base.forcing.R = cfg.R.value_or(default_forcing_ratio(rho));

  if (fig == "fig2") {
    OuterConfig exact = base;
    exact.inner = InnerSolverSpec::direct();
    const SolveTrace te = alm_exact(p, exact);
    OuterConfig cg = base;
    cg.inner = InnerSolverSpec::cg();
    Rng rng = make_rng(cfg.source.seed, SeedStream::Trajectory, 0);
    const SolveTrace tc = ialm_run(p, cg, rng);
    OuterConfig rs = base;
    rs.inner = InnerSolverSpec{};
    rs.inner.method = InnerMethod::RSSOR;
    rs.seed = cfg.source.seed;
    const MonteCarloResult mc = monte_carlo(p, rs, cfg.trials, cfg.threads);

    CsvTable trace = trace_table();
    append_trace(trace, "alm_exact", te);
    append_trace(trace, "ialm_cg", tc);
    detail::emit(rep, cfg, "trace.csv", trace);
    const TheoreticalBounds b = compute_bounds(p, sys, base.forcing, cg.inner);
    const auto env = exact_primal_envelope(b, beta, te.records.size() - 1);
    CsvTable et{{"outer_iter", "primal_res", "envelope"}, {}};
    for (std::size_t k = 0; k < te.records.size(); ++k) et.add(k, te.records[k].residuals.primal, env[k]);
    detail::emit(rep, cfg, "envelope.csv", et);
    detail::emit(rep, cfg, "aggregate_rsgs.csv", aggregate_table(mc.rows));
    detail::emit(rep, cfg, "bounds.csv", bounds_table(b));
    rep.notes.push_back(detail::status_note("alm_exact", te));
    rep.notes.push_back(detail::status_note("ialm_cg", tc));
    return rep;
  }
  if (fig == "fig4") {
    OuterConfig admm = base;
    admm.inner = InnerSolverSpec::gauss_seidel_sweeps(1);
    const SolveTrace ta = admm_run(p, admm);
    OuterConfig gs = base;
    gs.inner = InnerSolverSpec::gauss_seidel_sweeps(10);
    Rng rng = make_rng(cfg.source.seed, SeedStream::Trajectory, 0);
    const SolveTrace tg = ialm_run(p, gs, rng);
    CsvTable a = trace_table();
    append_trace(a, "admm", ta);
    detail::emit(rep, cfg, "trace_admm.csv", a);
    CsvTable g = trace_table();
    append_trace(g, "ialm_gs10", tg);
    detail::emit(rep, cfg, "trace_ialm_gs10.csv", g);
    rep.notes.push_back(detail::status_note("admm", ta));
    rep.notes.push_back(detail::status_note("ialm_gs10", tg));
    return rep;
  }
  if (fig == "fig5") {
    CsvTable a = trace_table();
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      Rng rng = make_rng(cfg.source.seed, SeedStream::Trajectory, i);
      OuterConfig r = base;
      r.inner = InnerSolverSpec::shuffled_gauss_seidel_sweeps(1);
      const SolveTrace t = radmm_run(p, r, rng);
      append_trace(a, std::to_string(i), t);
      rep.notes.push_back(detail::status_note("radmm trial " + std::to_string(i), t));
    }
    detail::emit(rep, cfg, "trace_radmm.csv", a);
    OuterConfig rs = base;
    rs.inner = InnerSolverSpec::shuffled_gauss_seidel_sweeps(10);
    rs.seed = cfg.source.seed;
    const MonteCarloResult mc = monte_carlo(p, rs, cfg.trials, cfg.threads);
    CsvTable g = trace_table();
    for (std::size_t i = 0; i < mc.traces.size(); ++i) {
      append_trace(g, std::to_string(i), mc.traces[i]);
      rep.notes.push_back(detail::status_note("ialm_rsgs10 trial " + std::to_string(i), mc.traces[i]));
    }
    detail::emit(rep, cfg, "trace_ialm_rsgs10.csv", g);
    return rep;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown figure '" + fig + "' (expected fig1..fig5)");
}

}  // namespace ialm
