#include "lowrank/solver.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lowrank/matrix_io.hpp"
#include "lowrank/svd.hpp"

namespace lowrank {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterReached: return "max_iter";
    case SolveStatus::Diverged: return "diverged";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("solver: gamma must be > 0");
  if (!(rho > 0.0) || !(rho < 2.0)) throw std::invalid_argument("solver: rho must be in (0, 2)");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (!(tol_fixed_point > 0.0)) throw std::invalid_argument("solver: tol_fixed_point must be > 0");
  if (tol_step < 0.0) throw std::invalid_argument("solver: tol_step must be >= 0");
  if (stall_window < 0) throw std::invalid_argument("solver: stall_window must be >= 0");
}

namespace {

struct StallDetector {
  long window;
  double min_improvement;
  double best = std::numeric_limits<double>::infinity();
  long since_improvement = 0;

  // True when the residual has not improved by min_improvement for a full
  // window of iterations. window == 0 disables the check.
  bool stalled(double res) {
    if (window == 0) return false;
    if (res < best - min_improvement) {
      best = res;
      since_improvement = 0;
      return false;
    }
    return ++since_improvement >= window;
  }
};

void record(IterateTrace& trace, const SolverConfig& cfg, long iter, double res_fix,
            double res_step, const Eigen::MatrixXd& X) {
  if (!cfg.record_trace) return;
  TraceRecord rec;
  rec.iter = iter;
  rec.res_fix = res_fix;
  rec.res_step = res_step;
  rec.objective = cfg.objective ? cfg.objective(X) : std::numeric_limits<double>::quiet_NaN();
  rec.rank_x = numerical_rank(X, cfg.rank_tol);
  trace.records.push_back(rec);
}

}  // namespace

IterateTrace douglas_rachford(const ProxFn& prox1, const ProxFn& prox2, const SolverConfig& cfg,
                              const Observer& observer) {
  cfg.validate();
  if (cfg.z0.size() == 0) throw std::invalid_argument("douglas_rachford: z0 must be set");

  IterateTrace trace;
  trace.status = SolveStatus::MaxIterReached;
  Eigen::MatrixXd Z = cfg.z0;
  Eigen::MatrixXd X, Y;
  StallDetector stall{cfg.stall_window, cfg.stall_improvement};

  for (long k = 1; k <= cfg.max_iter; ++k) {
    X = prox1(Z);
    Y = prox2(2.0 * X - Z);
    const double res_fix = (Y - X).norm();
    const double res_step = cfg.rho * res_fix;
    Z += cfg.rho * (Y - X);
    trace.iterations = k;
    record(trace, cfg, k, res_fix, res_step, X);
    if (observer) observer(k, X, Y, Z);

    if (res_fix <= cfg.tol_fixed_point) {
      trace.status = SolveStatus::Converged;
      break;
    }
    if (!Z.allFinite() || Z.norm() > cfg.diverge_norm || stall.stalled(res_fix)) {
      trace.status = SolveStatus::Diverged;
      break;
    }
    if (res_step <= cfg.tol_step) break;  // stagnated short of the tolerance
  }

  trace.X = X;
  trace.Y = Y;
  trace.Z = Z;
  return trace;
}

IterateTrace forward_backward(const ProxFn& prox1, const GradFn& grad_f2, double lipschitz,
                              const SolverConfig& cfg, const Observer& observer) {
  cfg.validate();
  if (cfg.z0.size() == 0) throw std::invalid_argument("forward_backward: z0 must be set");
  if (lipschitz > 0.0 && cfg.gamma >= 2.0 / lipschitz)
    throw std::invalid_argument("forward_backward: gamma must be < 2/L");

  IterateTrace trace;
  trace.status = SolveStatus::MaxIterReached;
  Eigen::MatrixXd X = cfg.z0;
  Eigen::MatrixXd Z = X;
  Eigen::MatrixXd Z_prev = Z;
  StallDetector stall{cfg.stall_window, cfg.stall_improvement};

  for (long k = 1; k <= cfg.max_iter; ++k) {
    Z_prev = Z;
    Z = X - cfg.gamma * grad_f2(X);
    Eigen::MatrixXd X_next = prox1(Z);
    const double res_fix = (X_next - X).norm();
    const double res_step = (Z - Z_prev).norm();
    X = std::move(X_next);
    trace.iterations = k;
    record(trace, cfg, k, res_fix, res_step, X);
    if (observer) observer(k, X, X, Z);

    if (res_fix <= cfg.tol_fixed_point) {
      trace.status = SolveStatus::Converged;
      break;
    }
    if (!X.allFinite() || X.norm() > cfg.diverge_norm || stall.stalled(res_fix)) {
      trace.status = SolveStatus::Diverged;
      break;
    }
    if (res_step <= cfg.tol_step) break;
  }

  trace.X = X;
  trace.Y = X;
  trace.Z = Z;
  return trace;
}

const TraceRecord& IterateTrace::last() const {
  if (records.empty()) throw std::logic_error("IterateTrace::last: no iterations recorded");
  return records.back();
}

void write_trace_csv(std::ostream& out, const IterateTrace& trace) {
  out << "iter,res_fix,res_step,objective,rank_x\n";
  for (const TraceRecord& rec : trace.records) {
    out << rec.iter << ',' << format_double(rec.res_fix) << ',' << format_double(rec.res_step)
        << ',' << format_double(rec.objective) << ',' << rec.rank_x << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const IterateTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_trace_csv: cannot open " + path.string());
  write_trace_csv(out, trace);
}

}  // namespace lowrank
