#include "lowrank/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lowrank/matrix_io.hpp"
#include "lowrank/svd.hpp"

namespace lowrank {

ProxFn make_objective_prox(const ObjectiveSpec& spec, Relaxation mode, long* tie_count) {
  if (mode == Relaxation::NonConvex)
    return [spec, tie_count](const Eigen::MatrixXd& Z) {
      RankTruncation t = prox_nonconvex_rank(spec, Z);
      if (tie_count && t.tie) ++*tie_count;
      return std::move(t.matrix);
    };
  if (spec.k.kind != ScalarKind::HalfSquare)
    throw std::invalid_argument(
        "make_objective_prox: the relaxed prox is only available for the half-square scalar term");
  return [spec](const Eigen::MatrixXd& Z) { return prox_envelope(spec, Z); };
}

ProxFn make_f2_prox(const ProblemSpec& p, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("make_f2_prox: gamma must be > 0");
  return [p, gamma](const Eigen::MatrixXd& Z) { return f2_prox(p, gamma, Z); };
}

namespace {

// f2 with its indicator peeled off, so traces stay finite between projections.
double f2_finite_part(const ProblemSpec& p, const Eigen::MatrixXd& X) {
  if (const auto* h = std::get_if<HankelApprox>(&p.variant))
    return -inner(X, h->H) + 0.5 * h->H.squaredNorm();
  if (const auto* q = std::get_if<QuadraticFit>(&p.variant))
    return 0.5 * (X - q->A).squaredNorm();
  return 0.0;
}

}  // namespace

double reporting_objective(const ProblemSpec& p, const ObjectiveSpec& spec, Relaxation mode,
                           const Eigen::MatrixXd& X) {
  const double gauge_part = mode == Relaxation::Convex
                                ? low_rank_inducing_norm_eval(spec.g, spec.r, X)
                                : gauge_eval(spec.g, X);
  return spec.k.value(gauge_part) + f2_finite_part(p, X);
}

IterateTrace solve_problem(const ProblemSpec& p, const ObjectiveSpec& spec, Relaxation mode,
                           Algorithm algo, SolverConfig cfg, const Observer& observer) {
  if (cfg.gamma != spec.gamma)
    throw std::invalid_argument("solve_problem: solver and objective gamma differ");
  if (cfg.z0.size() == 0) cfg.z0 = Eigen::MatrixXd::Zero(p.rows(), p.cols());
  if (cfg.z0.rows() != p.rows() || cfg.z0.cols() != p.cols())
    throw std::invalid_argument("solve_problem: z0 shape does not match the problem");
  if (!cfg.objective)
    cfg.objective = [p, spec, mode](const Eigen::MatrixXd& X) {
      return reporting_objective(p, spec, mode, X);
    };

  long ties = 0;
  const ProxFn prox1 = make_objective_prox(spec, mode, &ties);
  IterateTrace trace;
  if (algo == Algorithm::DouglasRachford) {
    trace = douglas_rachford(prox1, make_f2_prox(p, cfg.gamma), cfg, observer);
  } else {
    const double L = f2_lipschitz(p);
    trace = forward_backward(
        prox1, [p](const Eigen::MatrixXd& X) { return f2_grad(p, X); }, L, cfg, observer);
  }
  trace.tie_count = ties;
  return trace;
}

PairRun run_pair(const ProblemSpec& p, const ObjectiveSpec& spec, const SolverConfig& cfg,
                 double eq_tol) {
  SolverConfig base = cfg;
  base.validate();
  if (base.gamma != spec.gamma)
    throw std::invalid_argument("run_pair: solver and objective gamma differ");
  if (base.z0.size() == 0) base.z0 = Eigen::MatrixXd::Zero(p.rows(), p.cols());

  PairRun run;
  run.convex.status = SolveStatus::MaxIterReached;
  run.nonconvex.status = SolveStatus::MaxIterReached;
  long ties = 0;
  const ProxFn prox_c = make_objective_prox(spec, Relaxation::Convex);
  const ProxFn prox_n = make_objective_prox(spec, Relaxation::NonConvex, &ties);
  const ProxFn prox_f2 = make_f2_prox(p, base.gamma);

  Eigen::MatrixXd Zc = base.z0, Zn = base.z0;
  Eigen::MatrixXd Xc, Xn, Yc, Yn;
  double res_c = 0.0, res_n = 0.0;
  bool blown_c = false, blown_n = false;

  // Both chains advance together so the per-iteration comparison is aligned;
  // the shared loop stops once each chain is converged or broken.
  for (long k = 1; k <= base.max_iter; ++k) {
    Xc = prox_c(Zc);
    Xn = prox_n(Zn);
    const bool eq = (Xc - Xn).norm() <= eq_tol * std::max(1.0, Xc.norm());
    run.equal.push_back(eq ? 1 : 0);
    if (!eq) {
      run.all_equal = false;
      if (run.first_unequal < 0) run.first_unequal = k;
    }
    Yc = prox_f2(2.0 * Xc - Zc);
    Yn = prox_f2(2.0 * Xn - Zn);
    res_c = (Yc - Xc).norm();
    res_n = (Yn - Xn).norm();
    Zc += base.rho * (Yc - Xc);
    Zn += base.rho * (Yn - Xn);
    run.convex.iterations = run.nonconvex.iterations = k;
    if (base.record_trace) {
      const double obj_c = reporting_objective(p, spec, Relaxation::Convex, Xc);
      const double obj_n = reporting_objective(p, spec, Relaxation::NonConvex, Xn);
      run.convex.records.push_back(
          {k, res_c, base.rho * res_c, obj_c, numerical_rank(Xc, base.rank_tol)});
      run.nonconvex.records.push_back(
          {k, res_n, base.rho * res_n, obj_n, numerical_rank(Xn, base.rank_tol)});
    }
    blown_c = blown_c || !Zc.allFinite() || Zc.norm() > base.diverge_norm;
    blown_n = blown_n || !Zn.allFinite() || Zn.norm() > base.diverge_norm;
    const bool done_c = res_c <= base.tol_fixed_point || blown_c;
    const bool done_n = res_n <= base.tol_fixed_point || blown_n;
    if (done_c && done_n) break;
  }

  run.convex.status = blown_c ? SolveStatus::Diverged
                      : res_c <= base.tol_fixed_point ? SolveStatus::Converged
                                                      : SolveStatus::MaxIterReached;
  run.nonconvex.status = blown_n ? SolveStatus::Diverged
                         : res_n <= base.tol_fixed_point ? SolveStatus::Converged
                                                         : SolveStatus::MaxIterReached;
  run.nonconvex.tie_count = ties;
  run.convex.X = Xc;
  run.convex.Y = Yc;
  run.convex.Z = Zc;
  run.nonconvex.X = Xn;
  run.nonconvex.Y = Yn;
  run.nonconvex.Z = Zn;
  return run;
}

namespace {

// Alternating rank truncation / Hankel projection until the rank-truncated
// point is Hankel to near machine precision; ends on the rank step so the
// result has rank <= r exactly and is a legitimate feasible candidate.
Eigen::MatrixXd repair_to_feasible(Eigen::MatrixXd M, Eigen::Index r) {
  for (int k = 0; k < 200; ++k) {
    M = svd_r(M, r).matrix;
    if (hankel_distance(M) <= 1e-13 * std::max(1.0, M.norm())) break;
    M = hankel_project(M);
  }
  return M;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("hankel_bench: cannot open " + tmp.string());
    out << body;
    if (!out) throw std::runtime_error("hankel_bench: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string trace_csv_string(const IterateTrace& trace) {
  std::ostringstream ss;
  write_trace_csv(ss, trace);
  return ss.str();
}

}  // namespace

BenchResult hankel_bench(const Eigen::MatrixXd& H, const HankelBenchConfig& cfg) {
  const ProblemSpec p = ProblemSpec::hankel(H);
  const Eigen::Index n = H.rows();
  const Eigen::Index r_max = cfg.r_max == 0 ? n - 1 : cfg.r_max;
  if (cfg.r_min < 1 || r_max < cfg.r_min || r_max > n)
    throw std::invalid_argument("hankel_bench: need 1 <= r_min <= r_max <= n");
  const double hnorm = H.norm();
  if (hnorm == 0.0) throw std::invalid_argument("hankel_bench: H must be nonzero");

  SolverConfig base = cfg.solver;
  if (base.z0.size() == 0) base.z0 = Eigen::MatrixXd::Zero(n, n);

  BenchResult result;
  for (Eigen::Index r = cfg.r_min; r <= r_max; ++r) {
    const ObjectiveSpec spec = ObjectiveSpec::half_square_l2(r, base.gamma);
    BenchRow row;
    row.r = r;
    if (cfg.run_convex) {
      IterateTrace trace = solve_problem(p, spec, Relaxation::Convex, Algorithm::DouglasRachford,
                                         base);
      row.status_convex = trace.status;
      row.iters_convex = trace.iterations;
      row.rank_convex = numerical_rank(trace.X, base.rank_tol);
      row.err_convex = (H - repair_to_feasible(trace.X, r)).norm() / hnorm;
      // Y is the f2-prox output, hence exactly Hankel; the relaxed objective
      // there bounds every rank-r candidate's value 1/2 ||H - M||^2 from below.
      row.lower_bound = std::sqrt(2.0 * std::max(lower_bound(p, spec, trace.Y), 0.0)) / hnorm;
      result.convex_traces.push_back(std::move(trace));
    }
    if (cfg.run_nonconvex) {
      IterateTrace trace = solve_problem(p, spec, Relaxation::NonConvex,
                                         Algorithm::DouglasRachford, base);
      row.status_nonconvex = trace.status;
      row.iters_nonconvex = trace.iterations;
      row.err_nonconvex = (H - trace.X).norm() / hnorm;
      result.nonconvex_traces.push_back(std::move(trace));
    }
    result.rows.push_back(row);
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream rank_csv, err_csv, summary_csv;
    rank_csv << "r,rank_convex\n";
    err_csv << "r,err_convex,err_nonconvex,lower_bound\n";
    summary_csv << "r,status_convex,iters_convex,status_nonconvex,iters_nonconvex\n";
    for (const BenchRow& row : result.rows) {
      rank_csv << row.r << ',' << row.rank_convex << '\n';
      err_csv << row.r << ',' << format_double(row.err_convex) << ','
              << format_double(row.err_nonconvex) << ',' << format_double(row.lower_bound)
              << '\n';
      summary_csv << row.r << ',' << (cfg.run_convex ? to_string(row.status_convex) : "skipped")
                  << ',' << row.iters_convex << ','
                  << (cfg.run_nonconvex ? to_string(row.status_nonconvex) : "skipped") << ','
                  << row.iters_nonconvex << '\n';
    }
    if (cfg.run_convex) write_text_atomic(cfg.out_dir / "rank_conv.csv", rank_csv.str());
    write_text_atomic(cfg.out_dir / "err.csv", err_csv.str());
    write_text_atomic(cfg.out_dir / "summary.csv", summary_csv.str());
    for (std::size_t i = 0; i < result.convex_traces.size(); ++i) {
      const std::string tag = "r" + std::to_string(cfg.r_min + static_cast<Eigen::Index>(i));
      write_text_atomic(cfg.out_dir / ("trace_convex_" + tag + ".csv"),
                        trace_csv_string(result.convex_traces[i]));
      write_matrix(cfg.out_dir / ("m_convex_" + tag + ".txt"), result.convex_traces[i].X);
    }
    for (std::size_t i = 0; i < result.nonconvex_traces.size(); ++i) {
      const std::string tag = "r" + std::to_string(cfg.r_min + static_cast<Eigen::Index>(i));
      write_text_atomic(cfg.out_dir / ("trace_nonconvex_" + tag + ".csv"),
                        trace_csv_string(result.nonconvex_traces[i]));
      write_matrix(cfg.out_dir / ("m_nonconvex_" + tag + ".txt"), result.nonconvex_traces[i].X);
    }
  }
  return result;
}

AttractionReport attraction_ball_test(const ProblemSpec& p, const ObjectiveSpec& spec,
                                      const DualCertificate& cert, const Eigen::MatrixXd& Z_star,
                                      const AttractionConfig& cfg) {
  if (cfg.solver.gamma != spec.gamma)
    throw std::invalid_argument("attraction_ball_test: solver and objective gamma differ");
  return attraction_ball_test(make_objective_prox(spec, Relaxation::Convex),
                              make_objective_prox(spec, Relaxation::NonConvex),
                              make_f2_prox(p, spec.gamma), cert, Z_star, cfg);
}

}  // namespace lowrank
