#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/experiments/csv.hpp"
#include "ialm/experiments/reproduce.hpp"
#include "ialm/outer_loop.hpp"
#include "ialm/spectral.hpp"

namespace ialm {

inline constexpr const char* cli_synopsis =
    "usage: ialm <solve|spectra|permscan|reproduce|check-bounds> [options]\n"
    "  --problem p1:<path>|p2|random:<d>,<m>  --beta <b>...  --R <ratio>\n"
    "  --inner direct|cg|gs|sor|rsgs|rssor  --omega <w>  --sweeps <n>  --stop forcing|fixed\n"
    "  --eps <e>  --max-outer <n>  --trials <n>  --seed <s>  --out <dir>\n";

namespace detail {

struct CliOptions {
  std::string problem = "p2";
  std::vector<double> betas{1.0};
  std::optional<double> R;
  std::string inner = "direct";
  double omega = 1.0;
  std::size_t sweeps = 1;
  std::string stop = "forcing";
  double eps = 1e-8;
  std::size_t max_outer = 2000;
  std::size_t trials = 1;
  std::uint64_t seed = 42;
  std::string out = ".";
  bool rbf_squared = false;
  double rbf_h = 0.5;
  std::size_t threads = 1;
  std::string fig;
  std::size_t matrices = 100;
  std::size_t order = 7;
};

inline InnerSolverSpec inner_spec(const CliOptions& o) {
  InnerSolverSpec s;
  if (o.inner == "direct") {
    s.method = InnerMethod::Direct;
  } else if (o.inner == "cg") {
    s.method = InnerMethod::CG;
  } else if (o.inner == "gs" || o.inner == "sor") {
    s.method = InnerMethod::SOR;
    s.omega = o.inner == "gs" ? 1.0 : o.omega;
  } else if (o.inner == "rsgs" || o.inner == "rssor") {
    s.method = InnerMethod::RSSOR;
    s.omega = o.inner == "rsgs" ? 1.0 : o.omega;
  } else {
    throw Error(ErrorKind::Parse, "unknown inner solver '" + o.inner + "'");
  }
  if (o.stop == "fixed")
    s.stop = StopMode::FixedSweeps;
  else if (o.stop != "forcing")
    throw Error(ErrorKind::Parse, "unknown stop mode '" + o.stop + "'");
  s.sweeps = o.sweeps;
  s.validate();
  return s;
}

inline ExperimentConfig experiment_config(const CliOptions& o) {
  ExperimentConfig c;
  c.source = parse_problem_source(o.problem, o.seed);
  c.source.kernel.squared_distance = o.rbf_squared;
  c.source.kernel.h = o.rbf_h;
  c.outer.beta = o.betas.front();
  c.outer.eps = o.eps;
  c.outer.max_outer = o.max_outer;
  c.outer.inner = inner_spec(o);
  c.outer.seed = o.seed;
  c.R = o.R;
  c.trials = o.trials;
  c.beta_grid = o.betas;
  c.output_dir = o.out;
  c.scan_matrices = o.matrices;
  c.scan_order = o.order;
  c.scan_omega = o.omega;
  c.threads = o.threads;
  return c;
}

inline QpProblem load_problem(const ExperimentConfig& c, std::ostream& err) {
  try {
    return build_problem(c.source);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io && c.source.kind == ProblemSource::Kind::Problem1)
      err << "heart_scale is available from " << heart_scale_url << "\n";
    throw;
  }
}

inline int cmd_solve(const CliOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig c = experiment_config(o);
  const QpProblem p = load_problem(c, err);
  const AugmentedSystem sys = build_augmented(p, c.outer.beta);
  const double rho = rho_G_beta_fast(sys);
  c.outer.forcing.R = c.R.value_or(default_forcing_ratio(rho));
  std::vector<SolveTrace> traces;
  if (c.outer.inner.method == InnerMethod::Direct) {
    traces.push_back(alm_exact(p, c.outer));
  } else if (c.trials > 1) {
    traces = monte_carlo(p, c.outer, c.trials, c.threads).traces;
  } else {
    Rng rng = make_rng(c.outer.seed, SeedStream::Trajectory, 0);
    traces.push_back(ialm_run(p, c.outer, rng));
  }
  CsvTable t = trace_table();
  bool diverged = false;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    append_trace(t, std::to_string(i), traces[i]);
    out << detail::status_note("run " + std::to_string(i), traces[i]) << "\n";
    diverged = diverged || traces[i].status == TraceStatus::Diverged;
  }
  write_csv(detail::out_path(c, "trace.csv"), t);
  out << "rho_beta " << format_real(rho) << "  R " << format_real(c.outer.forcing.R) << "\n";
  return diverged ? 1 : 0;
}

inline int cmd_spectra(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = experiment_config(o);
  const QpProblem p = load_problem(c, err);
  const CsvTable t = spectra_table(p, c.beta_grid);
  write_csv(detail::out_path(c, "spectra.csv"), t);
  out << "beta,rho_G,rho_G_admm,cond_saddle,cond_Hbeta\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (p.blocks().count() <= Tolerances::max_enumeration_order)
    for (double beta : c.beta_grid)
      out << "beta " << format_real(beta) << " rho_G_bar "
          << format_real(expected_iteration_matrix(build_augmented(p, beta)).spectral_radius()) << "\n";
  return 0;
}

inline int cmd_permscan(const CliOptions& o, std::ostream& out) {
  ExperimentConfig c;
  c.source.seed = o.seed;
  c.output_dir = o.out;
  c.scan_matrices = o.matrices;
  c.scan_order = o.order;
  c.scan_omega = o.omega;
  c.threads = o.threads;
  const CsvTable t = permscan_table(c);
  write_csv(detail::out_path(c, "permscan.csv"), t);
  out << "wrote " << t.rows.size() << " radii\n";
  return 0;
}

inline int cmd_reproduce(const CliOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig c = experiment_config(o);
  if (c.source.kind == ProblemSource::Kind::Problem1 && o.fig != "fig3") load_problem(c, err);
  if (o.trials == 1) c.trials = 15;
  const ReproduceReport rep = reproduce(o.fig, c);
  for (const auto& n : rep.notes) out << n << "\n";
  for (const auto& f : rep.files) out << "wrote " << f << "\n";
  return 0;
}

inline int cmd_check_bounds(const CliOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig c = experiment_config(o);
  if (c.outer.inner.method == InnerMethod::Direct) c.outer.inner = InnerSolverSpec::cg();
  const QpProblem p = load_problem(c, err);
  const AugmentedSystem sys = build_augmented(p, c.outer.beta);
  c.outer.forcing.R = c.R.value_or(default_forcing_ratio(rho_G_beta_fast(sys)));
  const TheoreticalBounds b = compute_bounds(p, sys, c.outer.forcing, c.outer.inner);
  write_csv(detail::out_path(c, "bounds.csv"), bounds_table(b));
  Rng rng = make_rng(c.outer.seed, SeedStream::Trajectory, 0);
  const SolveTrace t = ialm_run(p, c.outer, rng);
  const auto env = inexact_residual_envelope(b, t);
  std::size_t violations = 0;
  for (std::size_t k = 0; k < env.size(); ++k)
    if (t.records[k].residuals.combined > env[k] * (1.0 + 1e-6)) ++violations;
  std::size_t max_inner = 0;
  for (const auto& r : t.records) max_inner = std::max(max_inner, r.inner_iterations);
  out << "rho_beta " << format_real(b.rho_beta) << "\n"
      << "residual envelope violations " << violations << " of " << env.size() << "\n"
      << "max inner iterations " << max_inner << "\n";
  if (b.j_bar_estimate) out << "j_bar estimate " << *b.j_bar_estimate << "\n";
  return t.status == TraceStatus::Diverged ? 1 : 0;
}

}  // namespace detail

// Exit codes: 0 success, 1 solver divergence, 2 usage or input errors.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact and inexact augmented Lagrangian experiments", "ialm"};
  app.require_subcommand(1);
  detail::CliOptions o;

  auto add_problem = [&](CLI::App* s) {
    s->add_option("--problem", o.problem, "p1:<path> | p2 | random:<d>,<m>");
    s->add_option("--seed", o.seed);
    s->add_option("--out", o.out);
    s->add_flag("--rbf-squared", o.rbf_squared, "square the distance in the problem-1 kernel");
    s->add_option("--rbf-h", o.rbf_h)->check(CLI::PositiveNumber);
  };
  auto add_solver = [&](CLI::App* s, bool multi_beta) {
    add_problem(s);
    if (multi_beta)
      s->add_option("--beta", o.betas)->check(CLI::PositiveNumber);
    else
      s->add_option("--beta", o.betas)->check(CLI::PositiveNumber)->expected(1);
    s->add_option("--R", o.R)->check(CLI::Range(0.0, 1.0));
    s->add_option("--inner", o.inner)->check(CLI::IsMember({"direct", "cg", "gs", "sor", "rsgs", "rssor"}));
    s->add_option("--omega", o.omega);
    s->add_option("--sweeps", o.sweeps)->check(CLI::PositiveNumber);
    s->add_option("--stop", o.stop)->check(CLI::IsMember({"forcing", "fixed"}));
    s->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    s->add_option("--max-outer", o.max_outer)->check(CLI::PositiveNumber);
    s->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
    s->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
  };

  CLI::App* solve = app.add_subcommand("solve", "run one solver configuration and write trace.csv");
  add_solver(solve, false);
  CLI::App* spectra = app.add_subcommand("spectra", "spectral radii and condition numbers over a beta grid");
  add_problem(spectra);
  spectra->add_option("--beta", o.betas)->check(CLI::PositiveNumber);
  CLI::App* permscan = app.add_subcommand("permscan", "rho of the shuffled GS matrix over all orderings");
  permscan->add_option("--matrices", o.matrices)->check(CLI::PositiveNumber);
  permscan->add_option("--order", o.order)->check(CLI::Range(1, 8));
  permscan->add_option("--omega", o.omega);
  permscan->add_option("--seed", o.seed);
  permscan->add_option("--out", o.out);
  permscan->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
  CLI::App* repro = app.add_subcommand("reproduce", "write the CSV series of one figure");
  add_solver(repro, true);
  repro->add_option("--fig", o.fig)->required()->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5"}));
  repro->add_option("--matrices", o.matrices)->check(CLI::PositiveNumber);
  repro->add_option("--order", o.order)->check(CLI::Range(1, 8));
  CLI::App* bounds = app.add_subcommand("check-bounds", "evaluate bound constants against a recorded run");
  add_solver(bounds, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << cli_synopsis;
    return 2;
  }

  try {
    if (*solve) return detail::cmd_solve(o, out, err);
    if (*spectra) return detail::cmd_spectra(o, out, err);
    if (*permscan) return detail::cmd_permscan(o, out);
    if (*repro) return detail::cmd_reproduce(o, out, err);
    if (*bounds) return detail::cmd_check_bounds(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::NoConvergence || e.kind() == ErrorKind::Breakdown) return 1;
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::Parse) err << cli_synopsis;
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << cli_synopsis;
  return 2;
}

}  // namespace ialm
