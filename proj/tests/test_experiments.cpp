#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ialm/experiments/cli.hpp"
#include "ialm/experiments/csv.hpp"
#include "ialm/experiments/libsvm.hpp"
#include "ialm/experiments/problems.hpp"
#include "ialm/experiments/reproduce.hpp"
#include "oracles.hpp"

using namespace ialm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ialm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ialm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write_synthetic_libsvm(const fs::path& path, std::size_t rows, std::uint64_t seed) {
  Rng rng = make_rng(seed, SeedStream::Problem, 99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::ofstream f(path);
  f << "# synthetic rows\n";
  for (std::size_t i = 0; i < rows; ++i) {
    f << (i % 2 ? "-1" : "+1");
    for (std::size_t c = 1; c <= heart_scale_features; ++c)
      if ((i + c) % 5) f << ' ' << c << ':' << format_real(u(rng));
    f << '\n';
  }
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Libsvm, ParsesSparseLineWithFixedWidth) {
  const LibsvmData d = parse_libsvm_text("+1 1:0.5 3:-1\n", 3);
  ASSERT_EQ(d.features.rows(), 1u);
  ASSERT_EQ(d.features.cols(), 3u);
  EXPECT_EQ(d.features(0, 0), 0.5);
  EXPECT_EQ(d.features(0, 1), 0.0);
  EXPECT_EQ(d.features(0, 2), -1.0);
  EXPECT_EQ(d.labels[0], 1.0);
}

TEST(Libsvm, CommentsBlankLinesAndMissingLabel) {
  const LibsvmData d = parse_libsvm_text("# header\n\n-1 2:4 # trailing\n1:7\n");
  ASSERT_EQ(d.features.rows(), 2u);
  EXPECT_EQ(d.features.cols(), 2u);
  EXPECT_EQ(d.labels[0], -1.0);
  EXPECT_EQ(d.features(0, 1), 4.0);
  EXPECT_EQ(d.labels[1], 0.0);
  EXPECT_EQ(d.features(1, 0), 7.0);
}

TEST(Libsvm, ErrorsCarryKinds) {
  auto kind_of = [](const std::string& text, std::optional<std::size_t> w) {
    try {
      (void)parse_libsvm_text(text, w);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  EXPECT_EQ(kind_of("", {}), ErrorKind::Parse);
  EXPECT_EQ(kind_of("# only a comment\n", {}), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 0:1\n", {}), ErrorKind::Index);
  EXPECT_EQ(kind_of("1 14:1\n", 13), ErrorKind::Index);
  EXPECT_EQ(kind_of("1 2:1 1:3\n", {}), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 1:abc\n", {}), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 1:2\nx 1:2\n", {}), ErrorKind::Parse);
  try {
    (void)parse_libsvm_text("1 1:2\n1 3:zz\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
  EXPECT_THROW(parse_libsvm("/nonexistent/heart_scale"), Error);
}

TEST(Libsvm, SerializeRoundTripIsIdempotent) {
  const fs::path dir = scratch("libsvm");
  write_synthetic_libsvm(dir / "a.txt", 40, 3);
  const LibsvmData once = parse_libsvm((dir / "a.txt").string(), heart_scale_features);
  EXPECT_EQ(once.features.rows(), 40u);
  EXPECT_EQ(once.features.cols(), heart_scale_features);
  const std::string s1 = serialize_libsvm(once);
  const LibsvmData twice = parse_libsvm_text(s1, heart_scale_features);
  EXPECT_EQ(twice.features, once.features);
  EXPECT_EQ(twice.labels, once.labels);
  EXPECT_EQ(serialize_libsvm(twice), s1);
}

TEST(Problems, KernelIsSymmetricWithUnitDiagonal) {
  const Matrix X{{0, 0}, {3, 4}, {0, 0}, {1, 1}};
  const Matrix K = kernel_matrix(X);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(K(i, i), 1.0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(K(i, j), K(j, i));
  }
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(K(0, j), K(2, j));
  EXPECT_NEAR(K(0, 1), std::exp(-5.0 / 0.25), 1e-30);
  KernelOptions sq;
  sq.squared_distance = true;
  EXPECT_NEAR(kernel_matrix(X, sq)(0, 1), std::exp(-25.0 / 0.25), 1e-60);
}

TEST(Problems, ProblemOneShape) {
  const fs::path dir = scratch("p1");
  write_synthetic_libsvm(dir / "h.txt", 30, 5);
  const LibsvmData d = parse_libsvm((dir / "h.txt").string(), heart_scale_features);
  const QpProblem p = build_problem1(d.features, 7);
  EXPECT_EQ(p.dim(), 30u);
  EXPECT_EQ(p.constraints(), 1u);
  EXPECT_EQ(p.A(), Matrix(1, 30, 1.0));
  EXPECT_EQ(p.b(), Vector{1});
  EXPECT_EQ(p.blocks().count(), 30u);
  EXPECT_EQ(p.g(), build_problem1(d.features, 7).g());
  EXPECT_NE(p.g(), build_problem1(d.features, 8).g());
}

TEST(Problems, ProblemTwoMatrices) {
  const QpProblem p = build_problem2(42);
  EXPECT_NEAR(oracle::determinant(oracle::from(p.A())), -1.0, 1e-14);
  EXPECT_EQ(p.H(), Matrix::diagonal(Vector{0.05, 0.05, 0.05}));
  EXPECT_EQ(p.blocks().sizes(), (std::vector<std::size_t>{1, 1, 1}));
  const auto AtA = oracle::matmul(oracle::transpose(oracle::from(p.A())), oracle::from(p.A()));
  const oracle::Mat hand{{3, 4, 5}, {4, 6, 7}, {5, 7, 9}};
  EXPECT_EQ(AtA, hand);
  const AugmentedSystem s = build_augmented(p, 1.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.H_beta(i, j), hand[i][j] + (i == j ? 0.05 : 0.0), 1e-15);
}

TEST(ProblemSource, ParsesAllKinds) {
  EXPECT_EQ(parse_problem_source("p2", 1).kind, ProblemSource::Kind::Problem2);
  const ProblemSource r = parse_problem_source("random:6,2", 1);
  EXPECT_EQ(r.kind, ProblemSource::Kind::Random);
  EXPECT_EQ(r.d, 6u);
  EXPECT_EQ(r.m, 2u);
  const ProblemSource q = parse_problem_source("p1:/tmp/x", 1);
  EXPECT_EQ(q.kind, ProblemSource::Kind::Problem1);
  EXPECT_EQ(q.path, "/tmp/x");
  EXPECT_THROW(parse_problem_source("random:2,3", 1), Error);
  EXPECT_THROW(parse_problem_source("p1", 1), Error);
  EXPECT_THROW(parse_problem_source("p3", 1), Error);
}

TEST(Csv, HeaderAndRoundTripDigits) {
  CsvTable t{{"a", "b,c"}, {}};
  t.add(0.1, std::string("x\"y"));
  t.add(1.0 / 3.0, 5);
  const std::string s = to_csv(t);
  EXPECT_EQ(s, "a,\"b,c\"\n0.10000000000000001,\"x\"\"y\"\n0.33333333333333331,5\n");
  EXPECT_EQ(std::strtod(format_real(1.0 / 3.0).c_str(), nullptr), 1.0 / 3.0);
  t.rows.push_back({"1"});
  EXPECT_THROW(to_csv(t), Error);
}

TEST(Reproduce, Fig1RadiusStrictlyDecreasing) {
  ExperimentConfig c;
  c.output_dir = scratch("fig1").string();
  const ReproduceReport r = reproduce("fig1", c);
  ASSERT_EQ(r.files.size(), 1u);
  const auto rows = csv_rows(slurp(r.files[0]));
  ASSERT_EQ(rows.size(), 14u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"beta", "rho_G", "rho_G_admm", "cond_saddle", "cond_Hbeta"}));
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
}

TEST(Reproduce, Fig3TwoByTwoHasTwoRadiiPerMatrix) {
  ExperimentConfig c;
  c.output_dir = scratch("fig3").string();
  c.scan_matrices = 4;
  c.scan_order = 2;
  const ReproduceReport r = reproduce("fig3", c);
  const auto rows = csv_rows(slurp(r.files[0]));
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"matrix_id", "perm_index", "spectral_radius"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][0], std::to_string((i - 1) / 2));
    EXPECT_EQ(rows[i][1], std::to_string((i - 1) % 2));
  }
}

TEST(Reproduce, Fig4AdmmDivergesAndTenSweepsConverge) {
  ExperimentConfig c;
  c.output_dir = scratch("fig4").string();
  c.outer.beta = 1.0;
  c.outer.max_outer = 2000;
  const ReproduceReport r = reproduce("fig4", c);
  ASSERT_EQ(r.files.size(), 2u);
  ASSERT_EQ(r.notes.size(), 2u);
  EXPECT_NE(r.notes[0].find("diverged"), std::string::npos) << r.notes[0];
  EXPECT_NE(r.notes[1].find("converged"), std::string::npos) << r.notes[1];
  EXPECT_EQ(csv_rows(slurp(r.files[0]))[0][0], "run_id");
}

TEST(Reproduce, UnknownFigureRejected) {
  ExperimentConfig c;
  c.output_dir = scratch("fig9").string();
  EXPECT_THROW(reproduce("fig9", c), Error);
}

TEST(Cli, NoArgumentsIsUsageError) {
  const CliRun r = cli({});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("usage: ialm"), std::string::npos);
  EXPECT_EQ(cli({"solve", "--inner", "bogus"}).code, 2);
  EXPECT_EQ(cli({"solve", "--problem", "p7"}).code, 2);
}

TEST(Cli, OneSweepDivergesWithTraceWritten) {
  const fs::path dir = scratch("cli_admm");
  const CliRun r = cli({"solve", "--problem", "p2", "--beta", "1", "--inner", "gs", "--sweeps", "1", "--stop", "fixed",
                        "--out", dir.string()});
  EXPECT_EQ(r.code, 1) << r.out << r.err;
  EXPECT_TRUE(fs::exists(dir / "trace.csv"));
  EXPECT_GT(csv_rows(slurp(dir / "trace.csv")).size(), 100u);
}

TEST(Cli, TenSweepsConverge) {
  const fs::path dir = scratch("cli_gs10");
  const CliRun r = cli({"solve", "--problem", "p2", "--beta", "1", "--inner", "gs", "--sweeps", "10", "--stop",
                        "fixed", "--eps", "1e-8", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("converged"), std::string::npos);
}

TEST(Cli, MissingDatasetPointsToUpstream) {
  const CliRun r = cli({"solve", "--problem", "p1:/nonexistent/heart_scale", "--out", scratch("cli_p1").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(heart_scale_url), std::string::npos);
}

TEST(Cli, ProblemOneFromFile) {
  const fs::path dir = scratch("cli_p1file");
  write_synthetic_libsvm(dir / "h.txt", 25, 11);
  const CliRun r = cli({"solve", "--problem", "p1:" + (dir / "h.txt").string(), "--beta", "0.1", "--inner", "cg",
                        "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("converged"), std::string::npos);
}

TEST(Cli, OutputIsByteIdenticalAcrossRunsAndThreads) {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const std::vector<std::string> base{"solve", "--problem", "p2", "--beta", "1", "--inner", "rsgs", "--trials", "4"};
  auto run = [&](const fs::path& dir, const std::string& threads) {
    auto args = base;
    for (const auto& x : {std::string("--threads"), threads, std::string("--out"), dir.string()}) args.push_back(x);
    return cli(args).code;
  };
  EXPECT_EQ(run(a, "1"), 0);
  EXPECT_EQ(run(b, "1"), 0);
  EXPECT_EQ(run(c, "3"), 0);
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(c / "trace.csv"));

  for (const auto& [dir, threads] : {std::pair{a, "1"}, std::pair{c, "2"}})
    EXPECT_EQ(cli({"permscan", "--matrices", "3", "--order", "5", "--threads", threads, "--out", dir.string()}).code, 0);
  EXPECT_EQ(slurp(a / "permscan.csv"), slurp(c / "permscan.csv"));
}

TEST(Cli, CheckBoundsReportsNoViolations) {
  const CliRun r = cli({"check-bounds", "--problem", "p2", "--beta", "1", "--inner", "cg", "--out",
                        scratch("cli_bounds").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("residual envelope violations 0 of"), std::string::npos) << r.out;
}

#ifdef IALM_CLI_PATH
TEST(Cli, ExecutableExitCodes) {
  auto status = [](const std::string& args) {
    const int s = std::system((std::string(IALM_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  const std::string out = scratch("exe").string();
  EXPECT_EQ(status(""), 2);
  EXPECT_EQ(status("solve --problem p2 --beta 1 --inner gs --sweeps 1 --stop fixed --out " + out), 1);
  EXPECT_EQ(status("solve --problem p2 --beta 1 --inner gs --sweeps 10 --stop fixed --eps 1e-8 --out " + out), 0);
}
#endif
