#include "lowrank/problems.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lowrank/matrix_io.hpp"
#include "lowrank/svd.hpp"

namespace lowrank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Eigen::Index ProblemSpec::rows() const {
  return std::visit(overloaded{[](const HankelApprox& p) { return p.H.rows(); },
                               [](const Completion& p) { return p.data.rows(); },
                               [](const QuadraticFit& p) { return p.A.rows(); }},
                    variant);
}

Eigen::Index ProblemSpec::cols() const {
  return std::visit(overloaded{[](const HankelApprox& p) { return p.H.cols(); },
                               [](const Completion& p) { return p.data.cols(); },
                               [](const QuadraticFit& p) { return p.A.cols(); }},
                    variant);
}

const char* ProblemSpec::name() const {
  return std::visit(overloaded{[](const HankelApprox&) { return "hankel"; },
                               [](const Completion&) { return "completion"; },
                               [](const QuadraticFit&) { return "quadratic"; }},
                    variant);
}

ProblemSpec ProblemSpec::hankel(Eigen::MatrixXd H) {
  if (H.rows() != H.cols()) throw std::invalid_argument("hankel problem: H must be square");
  if (hankel_distance(H) > 1e-12 * std::max(1.0, H.norm()))
    throw std::invalid_argument("hankel problem: H must be a Hankel matrix");
  return {HankelApprox{std::move(H)}};
}

ProblemSpec ProblemSpec::completion(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask,
                                    Eigen::MatrixXd data) {
  if (mask.rows() != data.rows() || mask.cols() != data.cols())
    throw std::invalid_argument("completion problem: mask and data shapes differ");
  return {Completion{std::move(mask), std::move(data)}};
}

ProblemSpec ProblemSpec::quadratic(Eigen::MatrixXd A) { return {QuadraticFit{std::move(A)}}; }

namespace {

void require_shape(const ProblemSpec& p, const Eigen::MatrixXd& Z, const char* op) {
  if (Z.rows() != p.rows() || Z.cols() != p.cols())
    throw std::invalid_argument(std::string(op) + ": argument shape does not match the problem");
}

}  // namespace

Eigen::MatrixXd f2_prox(const ProblemSpec& p, double gamma, const Eigen::MatrixXd& Z) {
  if (!(gamma > 0.0)) throw std::invalid_argument("f2_prox: gamma must be > 0");
  require_shape(p, Z, "f2_prox");
  return std::visit(
      overloaded{[&](const HankelApprox& h) -> Eigen::MatrixXd {
                   return hankel_project(Z + gamma * h.H);
                 },
                 [&](const Completion& c) -> Eigen::MatrixXd {
                   Eigen::MatrixXd out = Z;
                   out = c.mask.select(c.data, out);
                   return out;
                 },
                 [&](const QuadraticFit& q) -> Eigen::MatrixXd {
                   return (Z + gamma * q.A) / (1.0 + gamma);
                 }},
      p.variant);
}

Eigen::MatrixXd f2_grad(const ProblemSpec& p, const Eigen::MatrixXd& X) {
  require_shape(p, X, "f2_grad");
  if (const auto* q = std::get_if<QuadraticFit>(&p.variant)) return X - q->A;
  throw std::invalid_argument("f2_grad: data term is not differentiable for this problem");
}

double f2_lipschitz(const ProblemSpec& p) {
  if (std::holds_alternative<QuadraticFit>(p.variant)) return 1.0;
  throw std::invalid_argument("f2_lipschitz: data term is not differentiable for this problem");
}

double f2_feasibility(const ProblemSpec& p, const Eigen::MatrixXd& M) {
  require_shape(p, M, "f2_feasibility");
  return std::visit(
      overloaded{[&](const HankelApprox&) { return hankel_distance(M); },
                 [&](const Completion& c) {
                   return std::sqrt(
                       c.mask.select(M - c.data, Eigen::MatrixXd::Zero(M.rows(), M.cols()))
                           .squaredNorm());
                 },
                 [&](const QuadraticFit&) { return 0.0; }},
      p.variant);
}

double f2_value(const ProblemSpec& p, const Eigen::MatrixXd& M, double feas_tol) {
  require_shape(p, M, "f2_value");
  if (f2_feasibility(p, M) > feas_tol * std::max(1.0, M.norm())) return kInf;
  return std::visit(overloaded{[&](const HankelApprox& h) {
                                 return -inner(M, h.H) + 0.5 * h.H.squaredNorm();
                               },
                               [&](const Completion&) { return 0.0; },
                               [&](const QuadraticFit& q) { return 0.5 * (M - q.A).squaredNorm(); }},
                    p.variant);
}

double f2_subgradient_residual(const ProblemSpec& p, const Eigen::MatrixXd& X,
                               const Eigen::MatrixXd& G) {
  require_shape(p, X, "f2_subgradient_residual");
  require_shape(p, G, "f2_subgradient_residual");
  return std::visit(
      overloaded{[&](const HankelApprox& h) {
                   // subgradients are -H + (Hankel subspace)^perp at Hankel X
                   const double in_plane = hankel_project(G + h.H).norm();
                   return std::max(in_plane, hankel_distance(X));
                 },
                 [&](const Completion& c) {
                   const double off_mask =
                       std::sqrt(c.mask
                                     .select(Eigen::MatrixXd::Zero(G.rows(), G.cols()), G)
                                     .squaredNorm());
                   return std::max(off_mask, f2_feasibility(p, X));
                 },
                 [&](const QuadraticFit& q) { return (G - (X - q.A)).norm(); }},
      p.variant);
}

ObjectiveValues objective_eval(const ProblemSpec& p, const ObjectiveSpec& spec,
                               const Eigen::MatrixXd& M, double rank_tol, double feas_tol) {
  require_shape(p, M, "objective_eval");
  if (spec.g.kind != GaugeKind::L2)
    throw std::invalid_argument("objective_eval: only the l2 gauge is enabled");
  const double f2 = f2_value(p, M, feas_tol);
  const Eigen::VectorXd sigma = full_svd(M).sigma;

  ObjectiveValues out;
  out.envelope = spec.k.value(low_rank_inducing_norm_sigma(spec.r, sigma)) + f2;
  if (numerical_rank(sigma, rank_tol) > spec.r)
    out.nonconvex = kInf;
  else
    out.nonconvex = spec.k.value(spec.g.value(sigma)) + f2;
  return out;
}

double lower_bound(const ProblemSpec& p, const ObjectiveSpec& spec, const Eigen::MatrixXd& M_star) {
  return objective_eval(p, spec, M_star).envelope;
}

namespace {

std::string next_word(std::istream& in, const char* what) {
  std::string w;
  if (!(in >> w)) throw std::invalid_argument(std::string("problem file: missing ") + what);
  return w;
}

double parse_value(const std::string& tok, const char* what) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("problem file: bad ") + what + " '" + tok + "'");
  }
}

// Reads "<name> rows cols entries..." with the "matrix" keyword already consumed.
Eigen::MatrixXd read_named_matrix_body(std::istream& in, const std::string& want) {
  const std::string name = next_word(in, "matrix name");
  if (name != want)
    throw std::invalid_argument("problem file: expected matrix " + want + ", got " + name);
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw std::invalid_argument("problem file: bad dimensions for matrix " + want);
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      A(i, j) = parse_value(next_word(in, "matrix entry"), "matrix entry");
  return A;
}

Eigen::MatrixXd read_named_matrix(std::istream& in, const std::string& want) {
  const std::string kw = next_word(in, "matrix keyword");
  if (kw != "matrix") throw std::invalid_argument("problem file: expected 'matrix', got " + kw);
  return read_named_matrix_body(in, want);
}

Eigen::VectorXd parse_generator(std::istream& in) {
  std::string rest;
  std::getline(in, rest);
  std::vector<double> vals;
  std::string tok;
  std::istringstream ss(rest);
  while (std::getline(ss, tok, ',')) {
    const size_t b = tok.find_first_not_of(" \t\r");
    if (b == std::string::npos) throw std::invalid_argument("problem file: empty generator entry");
    const size_t e = tok.find_last_not_of(" \t\r");
    vals.push_back(parse_value(tok.substr(b, e - b + 1), "generator entry"));
  }
  if (vals.empty()) throw std::invalid_argument("problem file: empty generator");
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

ProblemSpec read_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_problem: cannot open " + path.string());
  const std::string kw = next_word(in, "variant keyword");
  if (kw != "variant") throw std::invalid_argument("problem file: expected 'variant', got " + kw);
  const std::string tag = next_word(in, "variant tag");

  if (tag == "hankel") {
    std::string which = next_word(in, "hankel payload");
    if (which == "generator") return ProblemSpec::hankel(hankel_from_generator(parse_generator(in)));
    if (which != "matrix") throw std::invalid_argument("problem file: bad hankel payload " + which);
    return ProblemSpec::hankel(read_named_matrix_body(in, "H"));
  }
  if (tag == "completion") {
    const Eigen::MatrixXd data = read_named_matrix(in, "data");
    const Eigen::MatrixXd mask_values = read_named_matrix(in, "mask");
    if (mask_values.rows() != data.rows() || mask_values.cols() != data.cols())
      throw std::invalid_argument("problem file: mask and data shapes differ");
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(mask_values.rows(),
                                                            mask_values.cols());
    for (Eigen::Index i = 0; i < mask_values.rows(); ++i)
      for (Eigen::Index j = 0; j < mask_values.cols(); ++j) {
        const double v = mask_values(i, j);
        if (v != 0.0 && v != 1.0)
          throw std::invalid_argument("problem file: mask entries must be 0 or 1");
        mask(i, j) = v == 1.0;
      }
    return ProblemSpec::completion(std::move(mask), data);
  }
  if (tag == "quadratic") return ProblemSpec::quadratic(read_named_matrix(in, "A"));
  throw std::invalid_argument("problem file: unknown variant " + tag);
}

namespace {

void write_named_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& A) {
  out << "matrix " << name << '\n' << A.rows() << ' ' << A.cols() << '\n';
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(A(i, j));
    }
    out << '\n';
  }
}

}  // namespace

void write_problem(const std::filesystem::path& path, const ProblemSpec& p) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_problem: cannot open " + path.string());
  out << "variant " << p.name() << '\n';
  std::visit(overloaded{[&](const HankelApprox& h) { write_named_matrix(out, "H", h.H); },
                        [&](const Completion& c) {
                          write_named_matrix(out, "data", c.data);
                          write_named_matrix(out, "mask", c.mask.cast<double>().matrix());
                        },
                        [&](const QuadraticFit& q) { write_named_matrix(out, "A", q.A); }},
             p.variant);
  if (!out) throw std::invalid_argument("write_problem: write failed for " + path.string());
}

}  // namespace lowrank
