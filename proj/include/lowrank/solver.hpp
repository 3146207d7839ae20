#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace lowrank {

using ProxFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;
using GradFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;
/// Called after every update with (iter, X_k, Y_k, Z_k).
using Observer = std::function<void(long, const Eigen::MatrixXd&, const Eigen::MatrixXd&, const Eigen::MatrixXd&)>;

enum class SolveStatus { Converged, MaxIterReached, Diverged };

const char* to_string(SolveStatus s);

struct TraceRecord {
  long iter = 0;
  double res_fix = 0.0;   // fixed-point residual (DR: ||Y_k - X_k||_F)
  double res_step = 0.0;  // ||Z_k - Z_{k-1}||_F
  double objective = 0.0;
  Eigen::Index rank_x = 0;
};

struct SolverConfig {
  double gamma = 1.0;  // prox step, > 0
  double rho = 1.0;    // relaxation, in (0, 2)
  long max_iter = 50000;
  double tol_fixed_point = 1e-9;  // stop when res_fix <= this (Converged)
  double tol_step = 1e-13;        // stagnation stop on res_step
  // Divergence detection: unbounded iterates, or no residual improvement of
  // at least stall_improvement over stall_window iterations while above
  // tolerance. stall_window = 0 disables the stall detector.
  double diverge_norm = 1e12;
  long stall_window = 1000;
  double stall_improvement = 1e-12;
  bool record_trace = true;
  double rank_tol = 1e-8;  // relative threshold for the trace rank column
  Eigen::MatrixXd z0;      // required, fixes the ambient shape
  // Optional scalar reported in the trace objective column.
  std::function<double(const Eigen::MatrixXd&)> objective;

  void validate() const;  // throws std::invalid_argument
};

struct IterateTrace {
  std::vector<TraceRecord> records;
  SolveStatus status = SolveStatus::MaxIterReached;
  long iterations = 0;
  long tie_count = 0;  // svd_r ties seen by the f1 prox (filled by the harness)
  Eigen::MatrixXd X, Y, Z;

  const TraceRecord& last() const;
};

/// Douglas-Rachford iteration for min f1 + f2 given the two prox operators
/// scaled by the same gamma as in cfg:
///   X_k = prox1(Z_{k-1}),  Y_k = prox2(2 X_k - Z_{k-1}),
///   Z_k = Z_{k-1} + rho (Y_k - X_k).
/// Converged means ||Y_k - X_k||_F <= tol_fixed_point. Provider exceptions
/// are rethrown with the failing iteration attached.
IterateTrace douglas_rachford(const ProxFn& prox1, const ProxFn& prox2,
                              const SolverConfig& cfg, const Observer& observer = {});

/// Forward-backward iteration X_k = prox1(X_{k-1} - gamma grad_f2(X_{k-1})).
/// Requires 0 < gamma < 2/lipschitz. Converged means
/// ||X_k - X_{k-1}||_F <= tol_fixed_point.
IterateTrace forward_backward(const ProxFn& prox1, const GradFn& grad_f2, double lipschitz,
                              const SolverConfig& cfg, const Observer& observer = {});

/// Columns: iter,res_fix,res_step,objective,rank_x (17 significant digits).
void write_trace_csv(std::ostream& out, const IterateTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const IterateTrace& trace);

}  // namespace lowrank
