#pragma once

#include "lowrank/certificates.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/solver.hpp"

#include <filesystem>
#include <vector>

namespace lowrank {

enum class Relaxation { Convex, NonConvex };
enum class Algorithm { DouglasRachford, ForwardBackward };

/// prox_{gamma f1} provider for the chosen relaxation. tie_count, when given,
/// is incremented every time the truncation hits tied singular values.
ProxFn make_objective_prox(const ObjectiveSpec& spec, Relaxation mode, long* tie_count = nullptr);
ProxFn make_f2_prox(const ProblemSpec& p, double gamma);

/// Composite objective without the indicator terms; equals the true objective
/// of the chosen relaxation on feasible points, and remains finite off them.
/// Used for the trace objective column.
double reporting_objective(const ProblemSpec& p, const ObjectiveSpec& spec, Relaxation mode,
                           const Eigen::MatrixXd& X);

/// Wire a problem and objective into the chosen algorithm. The solver gamma
/// is taken from cfg and must match spec.gamma.
IterateTrace solve_problem(const ProblemSpec& p, const ObjectiveSpec& spec, Relaxation mode,
                           Algorithm algo, SolverConfig cfg, const Observer& observer = {});

/// Convex and non-convex DR run in lockstep from the same starting point,
/// recording for every iteration whether the two prox outputs agree.
struct PairRun {
  IterateTrace convex;
  IterateTrace nonconvex;
  std::vector<char> equal;
  bool all_equal = true;
  long first_unequal = -1;
};

PairRun run_pair(const ProblemSpec& p, const ObjectiveSpec& spec, const SolverConfig& cfg,
                 double eq_tol = 1e-8);

struct BenchRow {
  Eigen::Index r = 0;
  Eigen::Index rank_convex = 0;
  // Relative error ||H - M||_F / ||H||_F of the convex solution repaired to a
  // feasible point (alternating rank truncation / Hankel projection, ending on
  // the rank step). The raw convex solution can exceed rank r, and its
  // raw error would undercut the rank-r lower bound.
  double err_convex = 0.0;
  double err_nonconvex = 0.0;  // ||H - M^n||_F / ||H||_F
  double lower_bound = 0.0;    // sqrt(2 max(bidual value, 0)) / ||H||_F
  SolveStatus status_convex = SolveStatus::MaxIterReached;
  SolveStatus status_nonconvex = SolveStatus::MaxIterReached;
  long iters_convex = 0;
  long iters_nonconvex = 0;
};

struct HankelBenchConfig {
  Eigen::Index r_min = 1;
  Eigen::Index r_max = 0;  // 0: n - 1
  SolverConfig solver;     // z0 defaults to zero when empty
  bool run_convex = true;
  bool run_nonconvex = true;
  std::filesystem::path out_dir;  // empty: keep everything in memory
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<IterateTrace> convex_traces;     // index r - r_min when run
  std::vector<IterateTrace> nonconvex_traces;
};

/// Sweep the rank bound over r = r_min..r_max for the Hankel approximation of
/// H, solving the relaxed and the non-convex problem with DR. When out_dir is
/// set, writes rank_conv.csv, err.csv and per-r traces and terminal matrices.
BenchResult hankel_bench(const Eigen::MatrixXd& H, const HankelBenchConfig& cfg);

/// attraction_ball_test wired to a problem.
AttractionReport attraction_ball_test(const ProblemSpec& p, const ObjectiveSpec& spec,
                                      const DualCertificate& cert, const Eigen::MatrixXd& Z_star,
                                      const AttractionConfig& cfg);

}  // namespace lowrank
