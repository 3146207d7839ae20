#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace lowrank {

/// Shortest decimal form with 17 significant digits; reading it back yields
/// the same double.
std::string format_double(double x);

/// Plain dense text: first line "n m", then n rows of m values.
Eigen::MatrixXd read_matrix_text(std::istream& in);
void write_matrix_text(std::ostream& out, const Eigen::MatrixXd& A);

/// CSV: one row per line, comma separated, no header.
Eigen::MatrixXd read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& A);

/// Format picked from the extension: ".csv" is CSV, everything else the plain
/// text format. Throws std::invalid_argument on missing or malformed files.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& A);

}  // namespace lowrank
