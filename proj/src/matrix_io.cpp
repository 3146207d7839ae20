#include "lowrank/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lowrank {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void require_finite(const Eigen::MatrixXd& A, const char* op) {
  if (!A.allFinite()) throw std::invalid_argument(std::string(op) + ": non-finite entries");
}

double parse_value(const std::string& tok, const char* op) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(op) + ": cannot parse value '" + tok + "'");
  }
}

}  // namespace

Eigen::MatrixXd read_matrix_text(std::istream& in) {
  long n = 0, m = 0;
  if (!(in >> n >> m) || n < 1 || m < 1)
    throw std::invalid_argument("read_matrix_text: expected a 'rows cols' header");
  Eigen::MatrixXd A(n, m);
  std::string tok;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < m; ++j) {
      if (!(in >> tok)) throw std::invalid_argument("read_matrix_text: file ended early");
      A(i, j) = parse_value(tok, "read_matrix_text");
    }
  require_finite(A, "read_matrix_text");
  return A;
}

void write_matrix_text(std::ostream& out, const Eigen::MatrixXd& A) {
  require_finite(A, "write_matrix_text");
  out << A.rows() << ' ' << A.cols() << '\n';
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(A(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_value(cell, "read_matrix_csv"));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("read_matrix_csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("read_matrix_csv: empty file");
  Eigen::MatrixXd A(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rows[i][j];
  require_finite(A, "read_matrix_csv");
  return A;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& A) {
  require_finite(A, "write_matrix_csv");
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      out << format_double(A(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_matrix: cannot open " + path.string());
  return path.extension() == ".csv" ? read_matrix_csv(in) : read_matrix_text(in);
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& A) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_matrix: cannot open " + path.string());
  if (path.extension() == ".csv")
    write_matrix_csv(out, A);
  else
    write_matrix_text(out, A);
  if (!out) throw std::invalid_argument("write_matrix: write failed for " + path.string());
}

}  // namespace lowrank
