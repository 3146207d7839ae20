#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lowrank/certificates.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/matrix_io.hpp"
#include "lowrank/prox.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/solver.hpp"
#include "lowrank/svd.hpp"

namespace lowrank::cli {
namespace {

const char* bool_word(bool b) { return b ? "true" : "false"; }

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// The vendored CLI11 only processes config files registered on the root app,
// never on a subcommand, so --config is expanded before parsing: every
// key=value the command line does not already carry becomes an ordinary
// "--key value" token pair. Later assignments in the file win over earlier
// ones; explicit flags always win over the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  const std::string flag = "--config";
  auto it = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
  if (it == args.end()) return args;

  std::string path;
  if (*it == flag) {
    if (std::next(it) == args.end()) throw std::invalid_argument("--config expects a file path");
    path = *std::next(it);
    args.erase(it, std::next(it, 2));
  } else {
    path = it->substr(flag.size() + 1);
    args.erase(it);
  }

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not readable: " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trimmed(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value, got '" + stripped + "'");
    const std::string key = trimmed(stripped.substr(0, eq));
    const std::string value = trimmed(stripped.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
    auto found = std::find_if(entries.begin(), entries.end(),
                              [&](const auto& e) { return e.first == key; });
    if (found == entries.end())
      entries.emplace_back(key, value);
    else
      found->second = value;
  }

  for (const auto& [key, value] : entries) {
    const std::string opt = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == opt || a.rfind(opt + "=", 0) == 0;
    });
    if (given) continue;
    args.push_back(opt);
    args.push_back(value);
  }
  return args;
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  const char* env = std::getenv("LOWRANK_SPLIT_SEED");
  if (!env) return flag_seed;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(env, &pos);
    if (pos != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("LOWRANK_SPLIT_SEED must be an unsigned integer");
  }
}

Eigen::MatrixXd random_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = gauss(rng);
  return A;
}

ObjectiveSpec make_spec(const std::string& k_name, Eigen::Index r, double gamma) {
  if (k_name == "half_square") return ObjectiveSpec::half_square_l2(r, gamma);
  if (k_name == "identity") return ObjectiveSpec::identity_l2(r, gamma);
  throw std::invalid_argument("unknown scalar term " + k_name);
}

// Solver knobs shared by solve and hankel-bench.
struct SolverFlags {
  double gamma = 1.0;
  double rho = 1.0;
  long max_iter = 50000;
  double tol = 1e-9;
  double tol_step = 1e-13;
  long stall_window = 1000;
  double stall_improvement = 1e-12;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gamma", gamma, "prox step size")->capture_default_str();
    cmd->add_option("--rho", rho, "relaxation parameter in (0,2)")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
    cmd->add_option("--tol", tol, "fixed-point residual tolerance")->capture_default_str();
    cmd->add_option("--tol-step", tol_step, "stagnation stop on the step size")
        ->capture_default_str();
    cmd->add_option("--stall-window", stall_window,
                    "iterations without residual improvement before declaring divergence "
                    "(0 disables)")
        ->capture_default_str();
    cmd->add_option("--stall-improvement", stall_improvement,
                    "minimum residual improvement that resets the stall window")
        ->capture_default_str();
  }

  SolverConfig to_config() const {
    SolverConfig cfg;
    cfg.gamma = gamma;
    cfg.rho = rho;
    cfg.max_iter = max_iter;
    cfg.tol_fixed_point = tol;
    cfg.tol_step = tol_step;
    cfg.stall_window = stall_window;
    cfg.stall_improvement = stall_improvement;
    return cfg;
  }
};

std::string certificate_report(const DualCertificate& cert, const Eigen::MatrixXd& M_star,
                               double rank_rel_tol = 1e-8) {
  std::ostringstream out;
  out << "r " << cert.r << '\n'
      << "gamma " << format_double(cert.gamma) << '\n'
      << "sigma_r " << format_double(cert.sigma_r) << '\n'
      << "sigma_r_plus_1 " << format_double(cert.sigma_r_plus_1) << '\n'
      << "gap " << format_double(cert.sigma_r - cert.sigma_r_plus_1) << '\n'
      << "tie_tol " << format_double(cert.tie_tol) << '\n'
      << "tie_multiplicity " << cert.tie_multiplicity << '\n'
      << "epsilon " << format_double(cert.epsilon) << '\n'
      << "guarantee " << bool_word(cert.low_rank_guarantee) << '\n'
      << "rank_m_star " << numerical_rank(M_star, rank_rel_tol) << '\n'
      << "rank_bound " << cert.r + cert.tie_multiplicity << '\n'
      << "rank_bound_ok " << bool_word(rank_bound_check(M_star, cert, rank_rel_tol)) << '\n';
  return out.str();
}

struct ProxArgs {
  std::string input, output, op, k_name = "half_square";
  Eigen::Index r = 1;
  double gamma = 1.0;
};

int run_prox(const ProxArgs& a) {
  const Eigen::MatrixXd Z = read_matrix(a.input);
  const ObjectiveSpec spec = make_spec(a.k_name, a.r, a.gamma);

  Eigen::MatrixXd out;
  bool tie = false;
  if (a.op == "nonconvex") {
    RankTruncation t = prox_nonconvex_rank(spec, Z);
    out = std::move(t.matrix);
    tie = t.tie;
  } else if (a.op == "envelope") {
    out = prox_envelope(spec, Z);
  } else if (a.op == "conjugate") {
    out = prox_conjugate(spec, Z);
  } else if (a.op == "gauge") {
    out = prox_scaled_gauge(spec, Z);
  } else {
    throw std::invalid_argument("unknown prox op " + a.op);
  }
  write_matrix(a.output, out);

  std::cout << "op " << a.op << '\n';
  if (a.op == "nonconvex") std::cout << "tie " << bool_word(tie) << '\n';
  if ((a.op == "nonconvex" || a.op == "envelope") && a.k_name == "half_square") {
    const ProxEquivalenceReport rep = prox_equivalence_conditions(spec, Z);
    std::cout << "cond_i " << bool_word(rep.cond_i) << '\n'
              << "cond_ii " << bool_word(rep.cond_ii) << '\n'
              << "cond_iii " << bool_word(rep.cond_iii) << '\n'
              << "cond_iv " << bool_word(rep.cond_iv) << '\n'
              << "all " << bool_word(rep.all()) << '\n'
              << "gap " << format_double(rep.gap) << '\n'
              << "agree " << bool_word(rep.agree()) << '\n';
  }
  return 0;
}

struct SolveArgs {
  std::string problem_path, mode, algo = "dr", k_name = "half_square", z0 = "zero", out_dir;
  Eigen::Index r = 1;
  SolverFlags solver;
  std::uint64_t seed = 1;
};

int run_solve(const SolveArgs& a) {
  const ProblemSpec p = read_problem(a.problem_path);
  const ObjectiveSpec spec = make_spec(a.k_name, a.r, a.solver.gamma);
  SolverConfig cfg = a.solver.to_config();
  if (a.z0 == "zero")
    cfg.z0 = Eigen::MatrixXd::Zero(p.rows(), p.cols());
  else if (a.z0 == "random")
    cfg.z0 = random_gaussian(p.rows(), p.cols(), effective_seed(a.seed));
  else
    cfg.z0 = read_matrix(a.z0);

  const Relaxation mode = a.mode == "convex" ? Relaxation::Convex : Relaxation::NonConvex;
  const Algorithm algo =
      a.algo == "fb" ? Algorithm::ForwardBackward : Algorithm::DouglasRachford;
  const IterateTrace trace = solve_problem(p, spec, mode, algo, cfg);

  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  write_trace_csv((dir / "trace.csv").string(), trace);
  write_matrix(dir / "m_star.txt", trace.X);
  write_matrix(dir / "y_star.txt", trace.Y);
  write_matrix(dir / "z_star.txt", trace.Z);
  const DualCertificate cert = dual_from_primal(trace.Z, trace.X, cfg.gamma, a.r);
  const std::string report = certificate_report(cert, trace.X);
  {
    std::ofstream cert_out(dir / "certificate.txt");
    if (!cert_out) throw std::runtime_error("cannot write certificate report");
    cert_out << report;
  }

  std::cout << "status " << to_string(trace.status) << '\n'
            << "iterations " << trace.iterations << '\n';
  if (!trace.records.empty()) {
    std::cout << "res_fix " << format_double(trace.records.back().res_fix) << '\n'
              << "objective " << format_double(trace.records.back().objective) << '\n'
              << "rank_x " << trace.records.back().rank_x << '\n';
  }
  std::cout << "tie_count " << trace.tie_count << '\n'
            << "guarantee " << bool_word(cert.low_rank_guarantee) << '\n';
  return trace.status == SolveStatus::Converged ? 0 : 3;
}

struct CertifyArgs {
  std::string z_path, m_path, out_path;
  Eigen::Index r = 1;
  double gamma = 1.0;
  double tie_tol = 0.0;
};

int run_certify(const CertifyArgs& a) {
  const Eigen::MatrixXd Z = read_matrix(a.z_path);
  const Eigen::MatrixXd M = read_matrix(a.m_path);
  const DualCertificate cert = dual_from_primal(Z, M, a.gamma, a.r, a.tie_tol);
  const std::string report = certificate_report(cert, M);
  std::cout << report;
  if (!a.out_path.empty()) {
    std::ofstream out(a.out_path);
    if (!out) throw std::runtime_error("cannot write certificate report to " + a.out_path);
    out << report;
  }
  return cert.low_rank_guarantee ? 0 : 1;
}

struct BenchArgs {
  Eigen::Index n = 10;
  std::string problem_path, mode = "both", out_dir;
  Eigen::Index r_min = 1, r_max = 0;
  SolverFlags solver;
};

int run_bench(const BenchArgs& a) {
  Eigen::MatrixXd H;
  if (!a.problem_path.empty()) {
    const ProblemSpec p = read_problem(a.problem_path);
    const auto* h = std::get_if<HankelApprox>(&p.variant);
    if (!h) throw std::invalid_argument("hankel-bench needs a hankel problem file");
    H = h->H;
  } else {
    H = build_triangle_hankel(a.n);
  }

  HankelBenchConfig cfg;
  cfg.r_min = a.r_min;
  cfg.r_max = a.r_max;
  cfg.solver = a.solver.to_config();
  cfg.run_convex = a.mode != "nonconvex";
  cfg.run_nonconvex = a.mode != "convex";
  cfg.out_dir = a.out_dir;
  const BenchResult result = hankel_bench(H, cfg);

  bool all_converged = true;
  for (const BenchRow& row : result.rows) {
    std::cout << "r " << row.r;
    if (cfg.run_convex)
      std::cout << " rank_convex " << row.rank_convex << " err_convex "
                << format_double(row.err_convex) << " lower_bound "
                << format_double(row.lower_bound) << " status_convex "
                << to_string(row.status_convex);
    if (cfg.run_nonconvex)
      std::cout << " err_nonconvex " << format_double(row.err_nonconvex) << " status_nonconvex "
                << to_string(row.status_nonconvex);
    std::cout << '\n';
    if (cfg.run_convex && row.status_convex != SolveStatus::Converged) all_converged = false;
    if (cfg.run_nonconvex && row.status_nonconvex != SolveStatus::Converged)
      all_converged = false;
  }
  return all_converged ? 0 : 3;
}

}  // namespace

int run(std::vector<std::string> args) {
  try {
    args = expand_config(std::move(args));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"proximal splitting for low-rank approximation problems"};
  std::string config_file;  // consumed by expand_config; declared for --help
  app.name("lowrank-split");
  app.require_subcommand(1);

  ProxArgs prox_args;
  auto* prox_cmd = app.add_subcommand("prox", "apply a proximal operator to a matrix file");
  prox_cmd->add_option("--config", config_file,
                       "flat key=value file; command-line flags override");
  prox_cmd->add_option("--op", prox_args.op, "nonconvex | envelope | conjugate | gauge")
      ->required()
      ->check(CLI::IsMember({"nonconvex", "envelope", "conjugate", "gauge"}));
  prox_cmd->add_option("--r", prox_args.r, "rank bound")->capture_default_str();
  prox_cmd->add_option("--gamma", prox_args.gamma, "prox step size")->capture_default_str();
  prox_cmd->add_option("--k", prox_args.k_name, "half_square | identity")
      ->capture_default_str()
      ->check(CLI::IsMember({"half_square", "identity"}));
  prox_cmd->add_option("input", prox_args.input, "input matrix file")
      ->required()
      ->check(CLI::ExistingFile);
  prox_cmd->add_option("output", prox_args.output, "output matrix file")->required();

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "run a splitting algorithm on a problem file");
  solve_cmd->add_option("--config", config_file,
                       "flat key=value file; command-line flags override");
  solve_cmd->add_option("--problem", solve_args.problem_path, "problem file")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--mode", solve_args.mode, "convex | nonconvex")
      ->required()
      ->check(CLI::IsMember({"convex", "nonconvex"}));
  solve_cmd->add_option("--algo", solve_args.algo, "dr | fb")
      ->capture_default_str()
      ->check(CLI::IsMember({"dr", "fb"}));
  solve_cmd->add_option("--r", solve_args.r, "rank bound")->capture_default_str();
  solve_cmd->add_option("--k", solve_args.k_name, "half_square | identity")
      ->capture_default_str()
      ->check(CLI::IsMember({"half_square", "identity"}));
  solve_cmd->add_option("--z0", solve_args.z0, "zero | random | matrix file path")
      ->capture_default_str();
  solve_cmd->add_option("--seed", solve_args.seed,
                        "seed for --z0 random (LOWRANK_SPLIT_SEED overrides)")
      ->capture_default_str();
  solve_cmd->add_option("--out", solve_args.out_dir, "output directory")->required();
  solve_args.solver.attach(solve_cmd);

  CertifyArgs certify_args;
  auto* certify_cmd =
      app.add_subcommand("certify", "build the dual certificate from terminal Z* and M* files");
  certify_cmd->add_option("--config", config_file,
                       "flat key=value file; command-line flags override");
  certify_cmd->add_option("--z", certify_args.z_path, "terminal Z* matrix file")
      ->required()
      ->check(CLI::ExistingFile);
  certify_cmd->add_option("--m", certify_args.m_path, "terminal M* matrix file")
      ->required()
      ->check(CLI::ExistingFile);
  certify_cmd->add_option("--r", certify_args.r, "rank bound")->required();
  certify_cmd->add_option("--gamma", certify_args.gamma, "prox step size used by the solve")
      ->capture_default_str();
  certify_cmd->add_option("--tie-tol", certify_args.tie_tol,
                          "singular value tie tolerance (0: automatic)")
      ->capture_default_str();
  certify_cmd->add_option("--out", certify_args.out_path, "also write the report to this file");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand(
      "hankel-bench", "rank sweep of the Hankel approximation problem, emitting CSV tables");
  bench_cmd->add_option("--config", config_file,
                       "flat key=value file; command-line flags override");
  bench_cmd->add_option("--n", bench_args.n, "size of the built-in triangular Hankel matrix")
      ->capture_default_str();
  bench_cmd->add_option("--problem", bench_args.problem_path,
                        "hankel problem file (overrides --n)")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--r-min", bench_args.r_min, "first rank bound")->capture_default_str();
  bench_cmd->add_option("--r-max", bench_args.r_max, "last rank bound (0: n-1)")
      ->capture_default_str();
  bench_cmd->add_option("--mode", bench_args.mode, "both | convex | nonconvex")
      ->capture_default_str()
      ->check(CLI::IsMember({"both", "convex", "nonconvex"}));
  bench_cmd->add_option("--out", bench_args.out_dir, "output directory")->required();
  bench_args.solver.attach(bench_cmd);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (prox_cmd->parsed()) return run_prox(prox_args);
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (certify_cmd->parsed()) return run_certify(certify_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
    std::cerr << "error: no subcommand given\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace lowrank::cli
