#include <doctest.h>

#include <Eigen/Core>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lowrank/hankel.hpp"
#include "lowrank/matrix_io.hpp"
#include "lowrank/problems.hpp"

using namespace lowrank;
namespace fs = std::filesystem;

namespace {

// the subcommands print their reports to stdout; parse errors go to stderr
struct CaptureStreams {
  std::ostringstream out, err;
  std::streambuf* old_out;
  std::streambuf* old_err;
  CaptureStreams()
      : old_out(std::cout.rdbuf(out.rdbuf())), old_err(std::cerr.rdbuf(err.rdbuf())) {}
  ~CaptureStreams() {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
  }
};

struct CliResult {
  int code = 0;
  std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
  CaptureStreams cap;
  CliResult res;
  res.code = cli::run(std::move(args));
  res.out = cap.out.str();
  res.err = cap.err.str();
  return res;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

fs::path fresh_dir(const char* stem) {
  const fs::path dir = fs::temp_directory_path() / (std::string("lowrank_cli_") + stem);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors and help") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"prox", "--op", "sideways", "a", "b"}).code == 2);
  CHECK(run_cli({"prox", "--op", "nonconvex", "/no/such/file", "out.txt"}).code == 2);
  const CliResult help = run_cli({"hankel-bench", "--help"});
  CHECK(help.code == 0);
  CHECK(contains(help.out, "--r-min"));
}

TEST_CASE("prox subcommand applies the operator and reports the conditions") {
  const fs::path dir = fresh_dir("prox");
  const fs::path in = dir / "in.txt";
  const fs::path out = dir / "out.txt";
  Eigen::MatrixXd Z(2, 2);
  Z << 2.0, 0.0, 0.0, 1.0;
  write_matrix(in, Z);

  const CliResult res = run_cli({"prox", "--op", "nonconvex", "--r", "1", "--gamma", "1",
                                 in.string(), out.string()});
  CHECK(res.code == 0);
  CHECK(contains(res.out, "op nonconvex"));
  CHECK(contains(res.out, "tie false"));
  // the boundary case: every equivalence condition holds with zero gap
  CHECK(contains(res.out, "all true"));
  CHECK(contains(res.out, "agree true"));

  Eigen::MatrixXd expected(2, 2);
  expected << 1.0, 0.0, 0.0, 0.0;
  CHECK((read_matrix(out) - expected).norm() <= 1e-14);

  // the envelope agrees with the truncation on an input of feasible rank
  Eigen::MatrixXd low(2, 2);
  low << 3.0, 0.0, 0.0, 0.0;
  write_matrix(in, low);
  const fs::path out2 = dir / "out2.txt";
  CHECK(run_cli({"prox", "--op", "envelope", "--r", "1", in.string(), out2.string()}).code == 0);
  CHECK(run_cli({"prox", "--op", "nonconvex", "--r", "1", in.string(), out.string()}).code == 0);
  CHECK((read_matrix(out) - read_matrix(out2)).norm() <= 1e-12);

  // argument validation inside the run (not the parser) still exits 2
  CHECK(run_cli({"prox", "--op", "nonconvex", "--r", "0", in.string(), out.string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("solve writes the whole output set") {
  const fs::path dir = fresh_dir("solve_triv");
  const fs::path pfile = dir / "problem.txt";
  // empty observation mask: the data term vanishes and the origin is optimal
  write_problem(pfile, ProblemSpec::completion(
                           Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                               2, 2, false),
                           Eigen::MatrixXd::Zero(2, 2)));
  const fs::path out = dir / "run";
  const CliResult res = run_cli(
      {"solve", "--problem", pfile.string(), "--mode", "nonconvex", "--out", out.string()});
  CHECK(res.code == 0);
  CHECK(contains(res.out, "status converged"));
  for (const char* name :
       {"trace.csv", "m_star.txt", "y_star.txt", "z_star.txt", "certificate.txt"}) {
    CHECK_MESSAGE(fs::exists(out / name), name);
  }
  CHECK(slurp(out / "trace.csv").rfind("iter,res_fix,res_step,objective,rank_x\n", 0) == 0);
  CHECK(read_matrix(out / "m_star.txt").norm() == 0.0);
  // certificate of the zero solution: sigma_r vanishes, so the guarantee holds
  CHECK(contains(slurp(out / "certificate.txt"), "guarantee true"));
  fs::remove_all(dir);
}

TEST_CASE("solve certifies the benchmark problem at a small rank") {
  const fs::path dir = fresh_dir("solve_hankel");
  const fs::path pfile = dir / "problem.txt";
  write_problem(pfile, ProblemSpec::hankel(build_triangle_hankel(10)));
  const fs::path out = dir / "run";
  const CliResult res = run_cli({"solve", "--problem", pfile.string(), "--mode", "convex",
                                 "--r", "2", "--out", out.string()});
  CHECK(res.code == 0);
  CHECK(contains(res.out, "status converged"));
  CHECK(contains(res.out, "rank_x 2"));
  CHECK(contains(res.out, "guarantee true"));
  CHECK(contains(slurp(out / "certificate.txt"), "rank_bound_ok true"));
  fs::remove_all(dir);
}

TEST_CASE("solve runs the gradient algorithm") {
  const fs::path dir = fresh_dir("solve_fb");
  const fs::path pfile = dir / "problem.txt";
  write_problem(pfile, ProblemSpec::quadratic(Eigen::MatrixXd::Identity(3, 3)));
  const fs::path out = dir / "run";
  const CliResult res = run_cli({"solve", "--problem", pfile.string(), "--mode", "convex",
                                 "--algo", "fb", "--r", "3", "--out", out.string()});
  CHECK(res.code == 0);
  CHECK((read_matrix(out / "m_star.txt") - Eigen::MatrixXd::Identity(3, 3) / 2.0).norm() <=
        1e-7);
  fs::remove_all(dir);
}

TEST_CASE("solve reports non-convergence through the exit code") {
  const fs::path dir = fresh_dir("solve_div");
  const fs::path pfile = dir / "problem.txt";
  write_problem(pfile, ProblemSpec::hankel(build_triangle_hankel(10)));
  const fs::path out = dir / "run";
  const CliResult res =
      run_cli({"solve", "--problem", pfile.string(), "--mode", "nonconvex", "--r", "5",
               "--gamma", "100", "--max-iter", "8000", "--out", out.string()});
  CHECK(res.code == 3);
  CHECK(contains(res.out, "status diverged"));
  fs::remove_all(dir);
}

TEST_CASE("certify splits the guarantee into exit codes") {
  const fs::path dir = fresh_dir("certify");
  const double gamma = 1.0;
  Eigen::MatrixXd M(3, 3), D(3, 3);
  M.setZero();
  M(0, 0) = 2.0;
  D.setZero();

  D.diagonal() << 1.0, 0.6, 0.2;
  write_matrix(dir / "m.txt", M);
  write_matrix(dir / "z_good.txt", M + gamma * D);
  const CliResult good =
      run_cli({"certify", "--z", (dir / "z_good.txt").string(), "--m", (dir / "m.txt").string(),
               "--r", "1", "--gamma", "1", "--out", (dir / "report.txt").string()});
  CHECK(good.code == 0);
  CHECK(contains(good.out, "guarantee true"));
  CHECK(contains(good.out, "tie_multiplicity 0"));
  CHECK(slurp(dir / "report.txt") == good.out);

  D.diagonal() << 1.0, 1.0, 0.2;
  write_matrix(dir / "z_tied.txt", M + gamma * D);
  const CliResult tied =
      run_cli({"certify", "--z", (dir / "z_tied.txt").string(), "--m", (dir / "m.txt").string(),
               "--r", "1", "--gamma", "1", "--tie-tol", "1e-8"});
  CHECK(tied.code == 1);
  CHECK(contains(tied.out, "guarantee false"));
  CHECK(contains(tied.out, "tie_multiplicity 1"));
  fs::remove_all(dir);
}

TEST_CASE("bench emits deterministic tables") {
  const fs::path d1 = fresh_dir("bench1");
  const fs::path d2 = fresh_dir("bench2");
  CHECK(run_cli({"hankel-bench", "--n", "4", "--out", d1.string()}).code == 0);
  CHECK(run_cli({"hankel-bench", "--n", "4", "--out", d2.string()}).code == 0);

  CHECK(slurp(d1 / "rank_conv.csv").rfind("r,rank_convex\n", 0) == 0);
  CHECK(slurp(d1 / "err.csv").rfind("r,err_convex,err_nonconvex,lower_bound\n", 0) == 0);
  CHECK(slurp(d1 / "summary.csv")
            .rfind("r,status_convex,iters_convex,status_nonconvex,iters_nonconvex\n", 0) == 0);
  for (const char* name : {"rank_conv.csv", "err.csv", "summary.csv", "trace_convex_r1.csv",
                           "trace_nonconvex_r3.csv", "m_convex_r2.txt", "m_nonconvex_r1.txt"}) {
    CHECK_MESSAGE(fs::exists(d1 / name), name);
    if (fs::exists(d1 / name) && fs::exists(d2 / name)) CHECK(slurp(d1 / name) == slurp(d2 / name));
  }

  // single-mode sweeps mark the other column as skipped
  const fs::path d3 = fresh_dir("bench3");
  CHECK(run_cli({"hankel-bench", "--n", "4", "--mode", "convex", "--out", d3.string()}).code ==
        0);
  CHECK(contains(slurp(d3 / "summary.csv"), ",skipped,"));
  CHECK_FALSE(fs::exists(d3 / "trace_nonconvex_r1.csv"));
  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove_all(d3);
}

TEST_CASE("config files supply defaults that flags override") {
  const fs::path dir = fresh_dir("config");
  const fs::path in = dir / "in.txt";
  Eigen::MatrixXd Z(2, 2);
  Z << 3.0, 0.0, 0.0, 0.0;
  write_matrix(in, Z);
  {
    std::ofstream cfg(dir / "prox.cfg");
    cfg << "op=envelope\nr=1\ngamma=0.5\n";
  }

  const fs::path out_cfg = dir / "a.txt";
  CHECK(run_cli({"prox", "--config", (dir / "prox.cfg").string(), in.string(),
                 out_cfg.string()}).code == 0);
  CHECK(read_matrix(out_cfg)(0, 0) == doctest::Approx(2.0).epsilon(1e-12));  // gamma = 0.5

  const fs::path out_flag = dir / "b.txt";
  CHECK(run_cli({"prox", "--config", (dir / "prox.cfg").string(), "--gamma", "1", in.string(),
                 out_flag.string()}).code == 0);
  CHECK(read_matrix(out_flag)(0, 0) == doctest::Approx(1.5).epsilon(1e-12));  // flag wins
  fs::remove_all(dir);
}

TEST_CASE("random starts honor the seed and the environment override") {
  const fs::path dir = fresh_dir("seed");
  const fs::path pfile = dir / "problem.txt";
  write_problem(pfile, ProblemSpec::quadratic(Eigen::MatrixXd::Identity(3, 3)));
  // one iteration from a random start leaves the terminal point seed-dependent
  const auto one_step = [&](const char* tag, const char* seed) {
    const fs::path out = dir / tag;
    (void)run_cli({"solve", "--problem", pfile.string(), "--mode", "convex", "--r", "3", "--z0",
                   "random", "--seed", seed, "--max-iter", "1", "--out", out.string()});
    return slurp(out / "z_star.txt");
  };

  unsetenv("LOWRANK_SPLIT_SEED");
  const std::string five = one_step("five", "5");
  const std::string nine = one_step("nine", "9");
  CHECK(five != nine);

  setenv("LOWRANK_SPLIT_SEED", "5", 1);
  CHECK(one_step("env", "9") == five);  // environment beats the flag

  setenv("LOWRANK_SPLIT_SEED", "banana", 1);
  const CliResult bad = run_cli({"solve", "--problem", pfile.string(), "--mode", "convex",
                                 "--z0", "random", "--out", (dir / "bad").string()});
  CHECK(bad.code == 2);
  unsetenv("LOWRANK_SPLIT_SEED");
  fs::remove_all(dir);
}
