#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lowrank/certificates.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/gauges.hpp"
#include "lowrank/hankel.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/prox.hpp"
#include "lowrank/solver.hpp"
#include "lowrank/svd.hpp"

namespace py = pybind11;
using namespace lowrank;

namespace {

ObjectiveSpec make_spec(const std::string& k, Eigen::Index r, double gamma) {
  if (k == "half_square") return ObjectiveSpec::half_square_l2(r, gamma);
  if (k == "identity") return ObjectiveSpec::identity_l2(r, gamma);
  throw std::invalid_argument("k must be 'half_square' or 'identity'");
}

Relaxation parse_mode(const std::string& mode) {
  if (mode == "convex") return Relaxation::Convex;
  if (mode == "nonconvex") return Relaxation::NonConvex;
  throw std::invalid_argument("mode must be 'convex' or 'nonconvex'");
}

Algorithm parse_algo(const std::string& algo) {
  if (algo == "dr") return Algorithm::DouglasRachford;
  if (algo == "fb") return Algorithm::ForwardBackward;
  throw std::invalid_argument("algo must be 'dr' or 'fb'");
}

py::dict trace_to_dict(const IterateTrace& t) {
  py::dict d;
  d["status"] = std::string(to_string(t.status));
  d["iterations"] = t.iterations;
  d["tie_count"] = t.tie_count;
  d["X"] = t.X;
  d["Y"] = t.Y;
  d["Z"] = t.Z;
  std::vector<double> res_fix, res_step, objective;
  std::vector<Eigen::Index> rank_x;
  res_fix.reserve(t.records.size());
  for (const TraceRecord& rec : t.records) {
    res_fix.push_back(rec.res_fix);
    res_step.push_back(rec.res_step);
    objective.push_back(rec.objective);
    rank_x.push_back(rec.rank_x);
  }
  d["res_fix"] = res_fix;
  d["res_step"] = res_step;
  d["objective"] = objective;
  d["rank_x"] = rank_x;
  return d;
}

py::dict solve_impl(const ProblemSpec& p, Eigen::Index r, double gamma, const std::string& mode,
                    const std::string& algo, const std::string& k, double rho, long max_iter,
                    double tol, double tol_step, long stall_window,
                    const std::optional<Eigen::MatrixXd>& z0) {
  SolverConfig cfg;
  cfg.gamma = gamma;
  cfg.rho = rho;
  cfg.max_iter = max_iter;
  cfg.tol_fixed_point = tol;
  cfg.tol_step = tol_step;
  cfg.stall_window = stall_window;
  if (z0) cfg.z0 = *z0;
  const IterateTrace t =
      solve_problem(p, make_spec(k, r, gamma), parse_mode(mode), parse_algo(algo), cfg);
  return trace_to_dict(t);
}

py::dict cert_to_dict(const DualCertificate& cert) {
  py::dict d;
  d["D_star"] = cert.D_star;
  d["r"] = cert.r;
  d["gamma"] = cert.gamma;
  d["sigma_r"] = cert.sigma_r;
  d["sigma_r_plus_1"] = cert.sigma_r_plus_1;
  d["tie_multiplicity"] = cert.tie_multiplicity;
  d["epsilon"] = cert.epsilon;
  d["guarantee"] = cert.low_rank_guarantee;
  d["tie_tol"] = cert.tie_tol;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "proximal splitting for low-rank matrix approximation";
  m.attr("__version__") = LOWRANK_VERSION;

  m.def("build_triangle_hankel", &build_triangle_hankel, py::arg("n"),
        "n x n Hankel matrix with generator (1,...,1,0,...,0)");
  m.def("hankel_project", &hankel_project, py::arg("a"),
        "orthogonal projection onto the Hankel subspace");
  m.def("hankel_from_generator", &hankel_from_generator, py::arg("h"));

  m.def(
      "svd_r",
      [](const Eigen::MatrixXd& z, Eigen::Index r, double tie_tol) {
        const RankTruncation t = svd_r(z, r, tie_tol);
        return py::make_tuple(t.matrix, t.tie);
      },
      py::arg("z"), py::arg("r"), py::arg("tie_tol") = 0.0,
      "best rank-r approximation and whether the cut hit tied singular values");
  m.def("numerical_rank",
        py::overload_cast<const Eigen::MatrixXd&, double>(&numerical_rank), py::arg("a"),
        py::arg("rel_tol") = 1e-8);

  m.def(
      "prox_nonconvex_rank",
      [](const Eigen::MatrixXd& z, Eigen::Index r, double gamma, const std::string& k) {
        const RankTruncation t = prox_nonconvex_rank(make_spec(k, r, gamma), z);
        return py::make_tuple(t.matrix, t.tie);
      },
      py::arg("z"), py::arg("r"), py::arg("gamma") = 1.0, py::arg("k") = "half_square",
      "one member of the prox of k(||.||) plus the rank indicator");
  m.def(
      "prox_envelope",
      [](const Eigen::MatrixXd& z, Eigen::Index r, double gamma) {
        return prox_envelope(ObjectiveSpec::half_square_l2(r, gamma), z);
      },
      py::arg("z"), py::arg("r"), py::arg("gamma") = 1.0,
      "prox of the convex envelope of the rank-constrained term");
  m.def(
      "prox_conjugate",
      [](const Eigen::MatrixXd& z, Eigen::Index r, double gamma) {
        return prox_conjugate(ObjectiveSpec::half_square_l2(r, gamma), z);
      },
      py::arg("z"), py::arg("r"), py::arg("gamma") = 1.0);
  m.def(
      "moreau_check",
      [](const Eigen::MatrixXd& z, Eigen::Index r, double gamma) {
        return moreau_check(ObjectiveSpec::half_square_l2(r, gamma), z);
      },
      py::arg("z"), py::arg("r"), py::arg("gamma") = 1.0,
      "residual of the Moreau decomposition at z");
  m.def(
      "prox_equivalence_conditions",
      [](const Eigen::MatrixXd& z, Eigen::Index r, double gamma) {
        const ProxEquivalenceReport rep =
            prox_equivalence_conditions(ObjectiveSpec::half_square_l2(r, gamma), z);
        py::dict d;
        d["cond_i"] = rep.cond_i;
        d["cond_ii"] = rep.cond_ii;
        d["cond_iii"] = rep.cond_iii;
        d["cond_iv"] = rep.cond_iv;
        d["all"] = rep.all();
        d["agree"] = rep.agree();
        d["gap"] = rep.gap;
        return d;
      },
      py::arg("z"), py::arg("r"), py::arg("gamma") = 1.0,
      "when does the envelope prox solve the non-convex problem at z");
  m.def("conjugate_prox_sigma", &conjugate_prox_sigma, py::arg("w"), py::arg("r"), py::arg("c"),
        "exact solution of the pooled vector prox on nonincreasing nonnegative input");

  m.def(
      "low_rank_inducing_norm",
      [](const Eigen::MatrixXd& a, Eigen::Index r) {
        return low_rank_inducing_norm_eval(GaugeSpec::l2(), r, a);
      },
      py::arg("a"), py::arg("r"));
  m.def(
      "truncated_dual_gauge",
      [](const Eigen::MatrixXd& a, Eigen::Index r) {
        return truncated_dual_gauge_eval(GaugeSpec::l2(), r, a);
      },
      py::arg("a"), py::arg("r"));

  m.def(
      "solve_hankel",
      [](const Eigen::MatrixXd& h, Eigen::Index r, double gamma, const std::string& mode,
         const std::string& algo, const std::string& k, double rho, long max_iter, double tol,
         double tol_step, long stall_window, const std::optional<Eigen::MatrixXd>& z0) {
        return solve_impl(ProblemSpec::hankel(h), r, gamma, mode, algo, k, rho, max_iter, tol,
                          tol_step, stall_window, z0);
      },
      py::arg("h"), py::arg("r"), py::arg("gamma") = 1.0, py::arg("mode") = "convex",
      py::arg("algo") = "dr", py::arg("k") = "half_square", py::arg("rho") = 1.0,
      py::arg("max_iter") = 50000, py::arg("tol") = 1e-9, py::arg("tol_step") = 1e-13,
      py::arg("stall_window") = 1000, py::arg("z0") = std::nullopt,
      "rank-bounded approximation of a Hankel matrix by splitting iterations");
  m.def(
      "solve_completion",
      [](const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& mask,
         const Eigen::MatrixXd& data, Eigen::Index r, double gamma, const std::string& mode,
         const std::string& algo, const std::string& k, double rho, long max_iter, double tol,
         double tol_step, long stall_window, const std::optional<Eigen::MatrixXd>& z0) {
        return solve_impl(ProblemSpec::completion(mask, data), r, gamma, mode, algo, k, rho,
                          max_iter, tol, tol_step, stall_window, z0);
      },
      py::arg("mask"), py::arg("data"), py::arg("r"), py::arg("gamma") = 1.0,
      py::arg("mode") = "convex", py::arg("algo") = "dr", py::arg("k") = "half_square",
      py::arg("rho") = 1.0, py::arg("max_iter") = 50000, py::arg("tol") = 1e-9,
      py::arg("tol_step") = 1e-13, py::arg("stall_window") = 1000, py::arg("z0") = std::nullopt);
  m.def(
      "solve_quadratic",
      [](const Eigen::MatrixXd& a, Eigen::Index r, double gamma, const std::string& mode,
         const std::string& algo, const std::string& k, double rho, long max_iter, double tol,
         double tol_step, long stall_window, const std::optional<Eigen::MatrixXd>& z0) {
        return solve_impl(ProblemSpec::quadratic(a), r, gamma, mode, algo, k, rho, max_iter, tol,
                          tol_step, stall_window, z0);
      },
      py::arg("a"), py::arg("r"), py::arg("gamma") = 1.0, py::arg("mode") = "convex",
      py::arg("algo") = "dr", py::arg("k") = "half_square", py::arg("rho") = 1.0,
      py::arg("max_iter") = 50000, py::arg("tol") = 1e-9, py::arg("tol_step") = 1e-13,
      py::arg("stall_window") = 1000, py::arg("z0") = std::nullopt);

  m.def(
      "dual_certificate",
      [](const Eigen::MatrixXd& z_star, const Eigen::MatrixXd& m_star, double gamma,
         Eigen::Index r, double tie_tol) {
        return cert_to_dict(dual_from_primal(z_star, m_star, gamma, r, tie_tol));
      },
      py::arg("z_star"), py::arg("m_star"), py::arg("gamma"), py::arg("r"),
      py::arg("tie_tol") = 0.0,
      "dual certificate (Z* - M*)/gamma with its spectral-gap guarantee");

  m.def(
      "hankel_bench",
      [](const Eigen::MatrixXd& h, Eigen::Index r_min, Eigen::Index r_max, double gamma,
         const std::string& out_dir) {
        HankelBenchConfig cfg;
        cfg.r_min = r_min;
        cfg.r_max = r_max;
        cfg.solver.gamma = gamma;
        cfg.out_dir = out_dir;
        const BenchResult res = hankel_bench(h, cfg);
        py::list rows;
        for (const BenchRow& row : res.rows) {
          py::dict d;
          d["r"] = row.r;
          d["rank_convex"] = row.rank_convex;
          d["err_convex"] = row.err_convex;
          d["err_nonconvex"] = row.err_nonconvex;
          d["lower_bound"] = row.lower_bound;
          d["status_convex"] = std::string(to_string(row.status_convex));
          d["status_nonconvex"] = std::string(to_string(row.status_nonconvex));
          d["iters_convex"] = row.iters_convex;
          d["iters_nonconvex"] = row.iters_nonconvex;
          rows.append(d);
        }
        return rows;
      },
      py::arg("h"), py::arg("r_min") = 1, py::arg("r_max") = 0, py::arg("gamma") = 1.0,
      py::arg("out_dir") = std::string(),
      "rank sweep of the Hankel approximation problem; optionally writes CSV tables");
}
